#include "svs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "svs/errors.hpp"

namespace svs {

GraphMatrices knn_affinity(const Dataset &data, int k,
                           std::optional<double> bandwidth) {
  data.validate();
  const Eigen::Index n = data.size();
  if (k < 1 || k >= n)
    throw InvalidArgument("knn_affinity: need 1 <= k < N");
  if (bandwidth && !(*bandwidth > 0.0))
    throw InvalidArgument("knn_affinity: bandwidth must be positive");

  const Matrix &x = data.points;
  const Vector sq = x.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * (x * x.transpose())).colwise() + sq;
  d2.rowwise() += sq.transpose();
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();

  // Neighbour lists, ties broken by index.
  std::vector<std::vector<Eigen::Index>> nbrs(n);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[0], order[i]);
    std::partial_sort(order.begin() + 1, order.begin() + 1 + k, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        if (d2(i, a) != d2(i, b)) return d2(i, a) < d2(i, b);
                        return a < b;
                      });
    nbrs[i].assign(order.begin() + 1, order.begin() + 1 + k);
  }

  Vector sigma(n);
  if (bandwidth) {
    sigma.setConstant(*bandwidth);
  } else {
    const int rank = (k + 1) / 2;
    for (Eigen::Index i = 0; i < n; ++i)
      sigma(i) = std::sqrt(d2(i, nbrs[i][rank - 1]));
    // Duplicate points give sigma = 0; fall back to the farthest listed
    // neighbour, then to the mean positive scale.
    double pos_sum = 0.0;
    int pos_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sigma(i) <= 0.0) sigma(i) = std::sqrt(d2(i, nbrs[i].back()));
      if (sigma(i) > 0.0) {
        pos_sum += sigma(i);
        ++pos_count;
      }
    }
    const double fallback = pos_count ? pos_sum / pos_count : 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (sigma(i) <= 0.0) sigma(i) = fallback;
  }

  GraphMatrices g;
  g.w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j : nbrs[i]) {
      const double wij = std::exp(-d2(i, j) / (2.0 * sigma(i) * sigma(j)));
      g.w(i, j) = wij;
      g.w(j, i) = wij;
    }
  }
  g.degree = g.w.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(g.degree(i) > 0.0)) {
      std::ostringstream os;
      os << "knn_affinity: vertex " << i << " is isolated (zero degree)";
      throw GraphConstructionError(os.str(), static_cast<std::size_t>(i));
    }
  }
  const Vector inv_sqrt = g.degree.cwiseSqrt().cwiseInverse();
  g.l = Matrix::Identity(n, n) -
        inv_sqrt.asDiagonal() * g.w * inv_sqrt.asDiagonal();
  g.l = 0.5 * (g.l + g.l.transpose()).eval();
  return g;
}

StiefelPoint sc_embed(const GraphMatrices &graph, int k) {
  const Eigen::Index n = graph.l.rows();
  if (k < 1 || k > n) throw InvalidArgument("sc_embed: need 1 <= K <= N");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(graph.l);
  if (eig.info() != Eigen::Success)
    throw NumericalFailure("sc_embed: eigensolver failed", 0);
  return eig.eigenvectors().leftCols(k);
}

} // namespace svs
