#include "svs/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "svs/errors.hpp"
#include "svs/random.hpp"

namespace svs {

namespace {

struct Lloyd {
  std::vector<int> labels;
  double inertia;
  std::vector<double> history;
};

Matrix plus_plus_seeds(const Matrix &x, int k, Rng &rng) {
  const Eigen::Index n = x.rows();
  Matrix c(k, x.cols());
  c.row(0) = x.row(static_cast<Eigen::Index>(rng.below(n)));
  Vector d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(n));
    }
    c.row(j) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - c.row(j)).rowwise().squaredNorm());
  }
  return c;
}

// Assigns every point to its nearest centroid; returns the inertia.
double assign(const Matrix &x, const Matrix &c, std::vector<int> &labels,
              Vector &dist) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
      const double d = (x.row(i) - c.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(j);
      }
    }
    labels[i] = arg;
    dist(i) = best;
    inertia += best;
  }
  return inertia;
}

Lloyd run_lloyd(const Matrix &x, int k, Rng &rng, int max_iterations) {
  const Eigen::Index n = x.rows();
  Matrix c = plus_plus_seeds(x, k, rng);
  Lloyd out;
  out.labels.assign(n, 0);
  Vector dist(n);
  out.inertia = assign(x, c, out.labels, dist);
  out.history.push_back(out.inertia);
  for (int it = 0; it < max_iterations; ++it) {
    Matrix sums = Matrix::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(out.labels[i]) += x.row(i);
      ++counts(out.labels[i]);
    }
    for (int j = 0; j < k; ++j) {
      if (counts(j) > 0) {
        c.row(j) = sums.row(j) / counts(j);
      } else {
        Eigen::Index far;
        dist.maxCoeff(&far);
        c.row(j) = x.row(far);
        dist(far) = 0.0;
      }
    }
    std::vector<int> next(n);
    const double inertia = assign(x, c, next, dist);
    const bool changed = next != out.labels;
    out.labels = std::move(next);
    out.inertia = inertia;
    out.history.push_back(inertia);
    if (!changed) break;
  }
  return out;
}

std::vector<int> compact(const std::vector<int> &labels, int &count) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    const auto [it, inserted] =
        remap.emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  count = static_cast<int>(remap.size());
  return out;
}

struct Contingency {
  Eigen::MatrixXd table;
  Vector rows;
  Vector cols;
  double n;
};

Contingency contingency(const std::vector<int> &a, const std::vector<int> &b,
                        const char *who) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << who << ": label vectors differ in length (" << a.size() << " vs "
       << b.size() << ")";
    throw InvalidArgument(os.str());
  }
  if (a.empty()) throw InvalidArgument(std::string(who) + ": empty labels");
  int ka = 0, kb = 0;
  const auto ca = compact(a, ka);
  const auto cb = compact(b, kb);
  Contingency t{Eigen::MatrixXd::Zero(ka, kb), Vector(), Vector(),
                static_cast<double>(a.size())};
  for (std::size_t i = 0; i < a.size(); ++i) t.table(ca[i], cb[i]) += 1.0;
  t.rows = t.table.rowwise().sum();
  t.cols = t.table.colwise().sum().transpose();
  return t;
}

double choose2(double x) { return 0.5 * x * (x - 1.0); }

} // namespace

Matrix row_normalize(const Matrix &u) {
  Matrix out = u;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double r = u.row(i).norm();
    if (!(r > 1e-12)) {
      std::ostringstream os;
      os << "row_normalize: row " << i << " has norm " << r;
      throw DegenerateEmbeddingError(os.str(), static_cast<std::size_t>(i));
    }
    out.row(i) /= r;
  }
  return out;
}

KMeansResult kmeans(const Matrix &rows, int k, int restarts,
                    std::uint64_t seed, int max_iterations) {
  if (k < 1 || k > rows.rows())
    throw InvalidArgument("kmeans: need 1 <= K <= N");
  if (restarts < 1) throw InvalidArgument("kmeans: restarts must be positive");
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Lloyd run = run_lloyd(rows, k, rng, max_iterations);
    if (run.inertia < best.inertia) {
      best.labels = std::move(run.labels);
      best.inertia = run.inertia;
      best.inertia_history = std::move(run.history);
    }
  }
  return best;
}

double nmi(const std::vector<int> &a, const std::vector<int> &b) {
  const Contingency t = contingency(a, b, "nmi");
  const auto entropy = [&](const Vector &counts) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < counts.size(); ++i)
      if (counts(i) > 0.0) h -= counts(i) / t.n * std::log(counts(i) / t.n);
    return h;
  };
  const double ha = entropy(t.rows), hb = entropy(t.cols);
  if (ha <= 0.0 && hb <= 0.0) return 1.0;
  if (ha <= 0.0 || hb <= 0.0) return 0.0;
  double mi = 0.0;
  for (Eigen::Index i = 0; i < t.table.rows(); ++i)
    for (Eigen::Index j = 0; j < t.table.cols(); ++j) {
      const double nij = t.table(i, j);
      if (nij > 0.0)
        mi += nij / t.n * std::log(nij * t.n / (t.rows(i) * t.cols(j)));
    }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double ari(const std::vector<int> &a, const std::vector<int> &b) {
  const Contingency t = contingency(a, b, "ari");
  if (t.n < 2.0) return 1.0;
  double index = 0.0;
  for (Eigen::Index i = 0; i < t.table.rows(); ++i)
    for (Eigen::Index j = 0; j < t.table.cols(); ++j)
      index += choose2(t.table(i, j));
  double sa = 0.0, sb = 0.0;
  for (Eigen::Index i = 0; i < t.rows.size(); ++i) sa += choose2(t.rows(i));
  for (Eigen::Index j = 0; j < t.cols.size(); ++j) sb += choose2(t.cols(j));
  const double expected = sa * sb / choose2(t.n);
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

} // namespace svs
