#include "svs/oracles.hpp"

#include <cmath>
#include <limits>

namespace svs::oracle {

namespace {

struct Minimum {
  double x;
  double value;
};

Minimum grid_minimize(const std::function<double(double)> &phi, double lo,
                      double hi, int nodes) {
  const double step = (hi - lo) / (nodes - 1);
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nodes; ++i) {
    const double v = phi(lo + i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = lo + std::max(0, best - 1) * step;
  double b = lo + std::min(nodes - 1, best + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = phi(d);
    }
  }
  Minimum m{0.5 * (a + b), 0.0};
  m.value = phi(m.x);
  if (best_value < m.value) m = {lo + best * step, best_value};
  return m;
}

} // namespace

double grid_prox(const std::function<double(double)> &r, double z, double t,
                 double radius, int nodes) {
  return grid_minimize(
             [&](double x) { return t * r(x) + 0.5 * (x - z) * (x - z); },
             z - radius, z + radius, nodes)
      .x;
}

double grid_envelope(const std::function<double(double)> &r, double z,
                     double t, double radius, int nodes) {
  return grid_minimize(
             [&](double x) { return t * r(x) + 0.5 * (x - z) * (x - z); },
             z - radius, z + radius, nodes)
      .value;
}

std::vector<SkewParam> skew_basis(Eigen::Index n, Eigen::Index p) {
  std::vector<SkewParam> basis;
  const double w = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) {
      SkewParam e = SkewParam::zeros(n, p);
      e.A(i, j) = w;
      e.A(j, i) = -w;
      basis.push_back(std::move(e));
    }
  for (Eigen::Index i = 0; i < n - p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      SkewParam e = SkewParam::zeros(n, p);
      e.B(i, j) = w;
      basis.push_back(std::move(e));
    }
  return basis;
}

Vector coordinates(const SkewParam &g, const std::vector<SkewParam> &basis) {
  Vector c(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) c(k) = dot(g, basis[k]);
  return c;
}

Vector fd_coordinates(const std::function<double(const SkewParam &)> &f,
                      const SkewParam &v, const std::vector<SkewParam> &basis,
                      double h) {
  Vector c(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    c(k) = (f(v + h * basis[k]) - f(v - h * basis[k])) / (2.0 * h);
  return c;
}

SkewParam random_skew(Eigen::Index n, Eigen::Index p, double scale, Rng &rng) {
  SkewParam v;
  const Matrix a = rng.normal_matrix(p, p);
  v.A = scale * (a - a.transpose()) / 2.0;
  v.B = scale * rng.normal_matrix(n - p, p);
  return v;
}

Matrix random_orthogonal(Eigen::Index n, Rng &rng) {
  return random_stiefel(n, n, rng);
}

Matrix dense_cayley_inverse(const Matrix &s, const SkewParam &v) {
  const Eigen::Index n = v.n(), p = v.p();
  const Matrix full = v.dense();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix inv = (id + full).inverse();
  return (s * (id - full) * inv).leftCols(p);
}

Matrix svd_polar(const Matrix &y) {
  Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

} // namespace svs::oracle
