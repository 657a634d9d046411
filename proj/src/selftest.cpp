#include "svs/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "svs/clustering.hpp"
#include "svs/composite.hpp"
#include "svs/dataset.hpp"
#include "svs/graph.hpp"
#include "svs/oracles.hpp"
#include "svs/prox.hpp"
#include "svs/riemannian.hpp"
#include "svs/spca.hpp"
#include "svs/ssc.hpp"
#include "svs/vsmooth.hpp"

namespace svs {

namespace {

// Tracks the worst value of a quantity against its limit.
struct Bound {
  const char *what;
  double limit;
  double worst = 0.0;
  long count = 0;

  void add(double value) {
    ++count;
    if (!(value <= worst)) worst = std::isnan(value) ? INFINITY : value;
  }
  bool ok() const { return worst <= limit; }
};

SuiteResult finish(const char *name, std::initializer_list<const Bound *> bounds) {
  SuiteResult r;
  r.name = name;
  r.passed = true;
  std::ostringstream os;
  bool first = true;
  for (const Bound *b : bounds) {
    r.passed = r.passed && b->ok();
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s %.2e (limit %.0e, n=%ld)",
                  first ? "" : "; ", b->what, b->worst, b->limit, b->count);
    os << buf;
    first = false;
  }
  r.detail = os.str();
  return r;
}

double mcp_scalar(double x, double theta) {
  const double a = std::abs(x);
  return a <= theta ? a - x * x / (2.0 * theta) : theta / 2.0;
}

Matrix scalars(Rng &rng, int count, double scale) {
  Matrix z(count, 1);
  for (int i = 0; i < count; ++i) z(i) = scale * (2.0 * rng.uniform() - 1.0);
  return z;
}

const double kIndices[] = {1e-3, 1e-2, 1e-1};

SuiteResult prox_suite(const SelftestOptions &o) {
  Rng rng(derive_seed(o.seed, 11));
  Bound err{"max |prox - grid oracle|", 1e-5};
  for (double lambda : {0.1, 1.0})
    for (double t : kIndices) {
      const Matrix z = scalars(rng, o.samples, 3.0 * std::max(1.0, t * lambda));
      const Matrix p = o.prox_l1(z, t, lambda);
      for (Eigen::Index i = 0; i < z.size(); ++i)
        err.add(std::abs(p(i) - oracle::grid_prox(
                                    [&](double x) { return lambda * std::abs(x); },
                                    z(i), t, 1.01 * t * lambda + 1e-3)));
    }
  for (auto [lambda, theta] : {std::pair{1.0, 1.0}, {0.1, 0.5}, {1.0, 0.05}})
    for (double t : kIndices) {
      if (t * lambda / theta >= 1.0) continue;
      const Matrix z = scalars(rng, o.samples, 3.0 * std::max(theta, t * lambda));
      const Matrix p = o.prox_mcp(z, t, lambda, theta);
      for (Eigen::Index i = 0; i < z.size(); ++i)
        err.add(std::abs(
            p(i) - oracle::grid_prox(
                       [&](double x) { return lambda * mcp_scalar(x, theta); },
                       z(i), t, 1.01 * t * lambda + 1e-3)));
    }
  return finish("prox_oracle", {&err});
}

SuiteResult moreau_suite(const SelftestOptions &o) {
  Rng rng(derive_seed(o.seed, 12));
  std::vector<WeaklyConvexFunction> fns{
      WeaklyConvexFunction::l1(1.0), WeaklyConvexFunction::l1(0.1),
      WeaklyConvexFunction::mcp(1.0, 1.0), WeaklyConvexFunction::mcp(1.0, 0.05)};
  Bound sandwich{"sandwich violation", 1e-10};
  Bound mono{"monotonicity violation", 1e-10};
  Bound gbound{"gradient bound excess", 1e-10};
  Bound fd{"envelope gradient vs finite difference", 1e-6};
  for (const auto &g : fns) {
    std::vector<double> valid;
    for (double mu : kIndices)
      if (g.eta() == 0.0 || mu * g.eta() < 1.0) valid.push_back(mu);
    const double lip = g.lipschitz();
    const Matrix z = scalars(rng, o.samples, 3.0);
    for (double mu : valid) {
      const MoreauEval e = moreau_eval(g, z, MoreauIndex{mu});
      const double gz = g.value(z);
      sandwich.add(e.value - gz);
      sandwich.add(gz - e.value - mu * lip * lip / 2.0 * z.size());
      gbound.add(e.grad.norm() - g.lipschitz_norm(z.size()));
      gbound.add(e.grad.cwiseAbs().maxCoeff() - lip);
      for (Eigen::Index i = 0; i < z.size(); i += 4) {
        const double h = 1e-6;
        Matrix a = z.row(i), b = z.row(i);
        a(0) += h;
        b(0) -= h;
        const double num = (moreau_value(g, a, MoreauIndex{mu}) -
                            moreau_value(g, b, MoreauIndex{mu})) /
                           (2.0 * h);
        // Skip points whose difference stencil straddles a kink of prox.
        const double za = std::abs(z(i));
        const double kinks[] = {mu * g.lambda(), g.theta()};
        bool near_kink = false;
        for (double k : kinks) near_kink = near_kink || std::abs(za - k) < 1e-4;
        if (!near_kink)
          fd.add(std::abs(num - e.grad(i)) / std::max(1.0, std::abs(e.grad(i))));
      }
    }
    for (std::size_t a = 0; a < valid.size(); ++a)
      for (std::size_t b = 0; b < valid.size(); ++b) {
        const double mu1 = valid[a], mu2 = valid[b];
        if (!(mu2 < mu1)) continue;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          const Matrix zi = z.row(i);
          const double v1 = moreau_value(g, zi, MoreauIndex{mu1});
          const double v2 = moreau_value(g, zi, MoreauIndex{mu2});
          mono.add(v1 - v2);
          mono.add(v2 - v1 - (mu1 - mu2) / mu2 * mu1 * lip * lip / 2.0);
        }
      }
  }
  return finish("moreau_properties", {&sandwich, &mono, &gbound, &fd});
}

SuiteResult cayley_suite(const SelftestOptions &o) {
  Rng rng(derive_seed(o.seed, 13));
  Bound trip{"round-trip residual", 1e-10};
  Bound orth{"orthonormality residual", 1e-12};
  Bound dense{"block vs dense formula", 1e-10};
  Bound adj{"adjoint identity residual", 1e-10};
  Bound diff{"differential vs finite difference", 1e-6};
  Bound opnorm{"operator norm excess over 2", 1e-8};
  for (auto [n, p] : {std::pair<Eigen::Index, Eigen::Index>{6, 2}, {20, 5}}) {
    for (int s = 0; s < 20; ++s) {
      const CayleyChart chart(oracle::random_orthogonal(n, rng), p);
      const SkewParam v = oracle::random_skew(n, p, 0.7, rng);
      const Matrix u = cayley_inverse(chart, v);
      orth.add((u.transpose() * u - Matrix::Identity(p, p)).norm());
      dense.add((u - oracle::dense_cayley_inverse(chart.S(), v)).norm());
      trip.add(norm(cayley_forward(chart, u) - v));
      const Matrix w = random_stiefel(n, p, rng);
      if (singularity_margin(chart, w) > 1e-3)
        trip.add((cayley_inverse(chart, cayley_forward(chart, w)) - w).norm());

      SkewParam d = oracle::random_skew(n, p, 1.0, rng);
      d *= 1.0 / norm(d);
      const Matrix m = rng.normal_matrix(n, p);
      const Matrix dv = cayley_differential(chart, v, d);
      adj.add(std::abs(frobenius_dot(dv, m) -
                       dot(d, cayley_adjoint_differential(chart, v, m))) /
              std::max(1.0, m.norm()));
      const double h = 1e-6;
      const Matrix num = (cayley_inverse(chart, v + h * d) -
                          cayley_inverse(chart, v - h * d)) /
                         (2.0 * h);
      diff.add((num - dv).norm() / std::max(1.0, dv.norm()));
      opnorm.add(dv.norm() - 2.0);
    }
  }
  return finish("cayley", {&trip, &orth, &dense, &adj, &diff, &opnorm});
}

double relative_error(const Vector &num, const Vector &an) {
  return (num - an).norm() / std::max(1e-12, an.norm());
}

SuiteResult gradient_suite(const SelftestOptions &o) {
  Rng rng(derive_seed(o.seed, 14));
  Bound spca{"SPCA surrogate gradient vs finite differences", 1e-5};
  Bound ssc{"SSC surrogate gradient vs finite differences", 1e-5};
  {
    const SpcaInstance inst = generate_spca(8, 3, 0.1, 200, o.seed);
    const auto ap = spca_problem(inst, random_stiefel(8, 3, rng));
    const auto basis = oracle::skew_basis(8, 3);
    const MoreauIndex mu{0.05};
    for (int s = 0; s < 10; ++s) {
      const SkewParam v = ap.v0 + oracle::random_skew(8, 3, 0.5, rng);
      const Vector num = oracle::fd_coordinates(
          [&](const SkewParam &x) { return surrogate_value(ap.problem, x, mu); },
          v, basis);
      spca.add(relative_error(
          num, oracle::coordinates(surrogate_grad(ap.problem, v, mu), basis)));
    }
  }
  {
    const Dataset data = make_blobs(5, 2, 2, 6.0, 1.0, o.seed);
    const GraphMatrices graph = knn_affinity(data, 3, std::nullopt);
    const auto ap = ssc_problem(graph, 2, WeaklyConvexFunction::mcp(0.1, 0.5));
    const auto basis = oracle::skew_basis(10, 2);
    const MoreauIndex mu{0.5};
    for (int s = 0; s < 10; ++s) {
      const SkewParam v = ap.v0 + oracle::random_skew(10, 2, 0.5, rng);
      const Vector num = oracle::fd_coordinates(
          [&](const SkewParam &x) { return surrogate_value(ap.problem, x, mu); },
          v, basis);
      ssc.add(relative_error(
          num, oracle::coordinates(surrogate_grad(ap.problem, v, mu), basis)));
    }
  }
  return finish("gradient_check", {&spca, &ssc});
}

SuiteResult descent_suite(const SelftestOptions &o) {
  Rng rng(derive_seed(o.seed, 15));
  const SpcaInstance inst = generate_spca(20, 2, 0.1, 500, o.seed);
  const auto ap = spca_problem(inst, random_stiefel(20, 2, rng));
  VSmoothOptions opts;
  opts.schedule = SmoothingSchedule::standard(1.0);
  opts.stop.max_iterations = 300;
  Bound armijo{"Armijo re-check violation", 1e-12};
  Bound orth{"iterate orthonormality residual", 1e-12};
  opts.observer = [&](const IterationRecord &r, const SkewParam &v,
                      const SkewParam &g) {
    const MoreauIndex mu{r.mu};
    const double next = surrogate_value(ap.problem, v - r.gamma * g, mu);
    armijo.add(next - (r.surrogate_value - opts.armijo.c * r.gamma * dot(g, g)));
    const Matrix u = cayley_inverse(ap.problem.chart(), v);
    orth.add((u.transpose() * u - Matrix::Identity(2, 2)).norm());
  };
  const SolverTrace trace = vsmooth_run(ap.problem, ap.v0, opts);
  Bound descent{"perturbed descent violation", 1e-9};
  const double m = opts.schedule.ratio_bound();
  const double lg = ap.problem.g_lipschitz();
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const auto &a = trace.records[i];
    const auto &b = trace.records[i + 1];
    descent.add(b.surrogate_value - a.surrogate_value -
                m / 2.0 * (a.mu - b.mu) * lg * lg);
  }
  return finish("descent", {&descent, &armijo, &orth});
}

SuiteResult baseline_suite(const SelftestOptions &o) {
  Rng rng(derive_seed(o.seed, 16));
  Bound tangent{"tangent residual", 1e-10};
  Bound idem{"projection idempotence", 1e-12};
  Bound polar{"polar retraction vs SVD polar factor", 1e-10};
  for (int s = 0; s < 20; ++s) {
    const Matrix u = random_stiefel(12, 3, rng);
    const Matrix x = rng.normal_matrix(12, 3);
    const TangentVector d = tangent_project(u, x);
    tangent.add((u.transpose() * d.direction + d.direction.transpose() * u).norm());
    idem.add((tangent_project(u, d.direction).direction - d.direction).norm());
    polar.add((polar_retract(u, d) - oracle::svd_polar(u + d.direction)).norm());
  }
  return finish("baselines", {&tangent, &idem, &polar});
}

SuiteResult clustering_suite(const SelftestOptions &o) {
  Bound null_vec{"normalized Laplacian null-vector residual", 1e-10};
  Bound metrics{"NMI/ARI example error", 1e-12};
  const Dataset data = make_blobs(20, 3, 2, 10.0, 1.0, o.seed);
  const GraphMatrices graph = knn_affinity(data, 5, std::nullopt);
  const Vector root = graph.degree.cwiseSqrt();
  null_vec.add((graph.l * root).norm());
  const std::vector<int> a{0, 0, 1, 1}, b{1, 1, 0, 0};
  metrics.add(std::abs(nmi(a, b) - 1.0));
  metrics.add(std::abs(ari(a, b) - 1.0));
  const ClusterScores sc =
      cluster_embedding(sc_embed(graph, 3), data.labels, 3, 10, o.seed);
  metrics.add(std::abs(*sc.nmi_mean - 1.0));
  return finish("clustering", {&null_vec, &metrics});
}

template <class Suite>
SuiteResult timed(const char *name, Suite suite, const SelftestOptions &o) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult r;
  try {
    r = suite(o);
  } catch (const std::exception &e) {
    r.name = name;
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

} // namespace

bool SelftestReport::passed() const {
  for (const auto &s : suites)
    if (!s.passed) return false;
  return !suites.empty();
}

SelftestOptions default_selftest_options() {
  SelftestOptions o;
  o.prox_l1 = [](const Matrix &z, double t, double lambda) {
    return prox_l1(z, t, lambda);
  };
  o.prox_mcp = [](const Matrix &z, double t, double lambda, double theta) {
    return prox_mcp(z, t, lambda, theta);
  };
  return o;
}

SelftestReport run_selftest(const SelftestOptions &options) {
  SelftestOptions o = options;
  const SelftestOptions defaults = default_selftest_options();
  if (!o.prox_l1) o.prox_l1 = defaults.prox_l1;
  if (!o.prox_mcp) o.prox_mcp = defaults.prox_mcp;
  SelftestReport report;
  report.suites.push_back(timed("prox_oracle", prox_suite, o));
  report.suites.push_back(timed("moreau_properties", moreau_suite, o));
  report.suites.push_back(timed("cayley", cayley_suite, o));
  report.suites.push_back(timed("gradient_check", gradient_suite, o));
  report.suites.push_back(timed("descent", descent_suite, o));
  report.suites.push_back(timed("baselines", baseline_suite, o));
  report.suites.push_back(timed("clustering", clustering_suite, o));
  return report;
}

SelftestReport run_selftest() { return run_selftest(default_selftest_options()); }

std::string format_report(const SelftestReport &report) {
  std::ostringstream os;
  for (const auto &s : report.suites) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4s %-18s %8.3fs  ", s.passed ? "PASS" : "FAIL",
                  s.name.c_str(), s.seconds);
    os << buf << s.detail << '\n';
  }
  os << (report.passed() ? "selftest: all suites passed"
                         : "selftest: FAILURES present")
     << '\n';
  return os.str();
}

} // namespace svs
