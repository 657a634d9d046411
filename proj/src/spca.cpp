#include "svs/spca.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <vector>

#include "svs/errors.hpp"
#include "svs/random.hpp"

namespace svs {

SpcaInstance SpcaInstance::from_data(Matrix xi, Eigen::Index p,
                                     double lambda) {
  if (p < 1 || p > xi.cols())
    throw InvalidArgument("SpcaInstance: need 1 <= p <= N");
  if (!(lambda >= 0.0))
    throw InvalidArgument("SpcaInstance: lambda must be nonnegative");
  SpcaInstance inst;
  inst.n = xi.cols();
  inst.p = p;
  inst.lambda = lambda;
  inst.gram = xi.transpose() * xi;
  inst.gram = 0.5 * (inst.gram + inst.gram.transpose()).eval();
  inst.xi = std::move(xi);
  return inst;
}

SpcaInstance generate_spca(Eigen::Index n, Eigen::Index p, double lambda,
                           Eigen::Index num_samples, std::uint64_t seed) {
  if (n < 1 || p < 1 || p > n || num_samples < 2)
    throw InvalidArgument("generate_spca: need N >= p >= 1 and >= 2 samples");
  Rng rng(seed);
  Matrix xi = rng.normal_matrix(num_samples, n);
  xi.rowwise() -= xi.colwise().mean();
  xi /= xi.norm();
  return SpcaInstance::from_data(std::move(xi), p, lambda);
}

AnchoredProblem spca_problem(const SpcaInstance &instance,
                             const StiefelPoint &u0) {
  if (u0.rows() != instance.n || u0.cols() != instance.p)
    throw InvalidArgument("spca_problem: U0 shape does not match instance");
  auto gram = std::make_shared<const Matrix>(instance.gram);
  SmoothFunction h;
  h.value = [gram](const Matrix &u) {
    return -(u.transpose() * (*gram * u)).trace();
  };
  h.gradient = [gram](const Matrix &u) -> Matrix {
    return -2.0 * (*gram * u);
  };
  // ||grad h(U1) - grad h(U2)||_F <= 2 ||G||_2 ||U1 - U2||_F
  h.grad_lipschitz =
      2.0 * Eigen::SelfAdjointEigenSolver<Matrix>(*gram, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .cwiseAbs()
                .maxCoeff();
  auto [chart, v0] = chart_from_anchor(u0);
  return {CompositeProblem(std::move(h), SmoothMapping::identity(),
                           WeaklyConvexFunction::l1(instance.lambda),
                           std::move(chart)),
          std::move(v0)};
}

double sparsity(const Matrix &u, double tol) {
  if (u.size() == 0) return 0.0;
  return static_cast<double>((u.array().abs() < tol).count()) /
         static_cast<double>(u.size());
}

double feasibility(const Matrix &u) {
  return (Matrix::Identity(u.cols(), u.cols()) - u.transpose() * u).norm();
}

void write_instance_csv(const SpcaInstance &instance, std::ostream &out) {
  char buf[32];
  for (Eigen::Index i = 0; i < instance.xi.rows(); ++i) {
    for (Eigen::Index j = 0; j < instance.xi.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", instance.xi(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

SpcaInstance read_instance_csv(std::istream &in, Eigen::Index p,
                               double lambda) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::logic_error &) {
        throw ParseError("instance CSV: malformed number '" + cell + "'",
                         line_no);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("instance CSV: ragged row", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("instance CSV: no data", line_no);
  Matrix xi(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) xi(i, j) = rows[i][j];
  return SpcaInstance::from_data(std::move(xi), p, lambda);
}

} // namespace svs
