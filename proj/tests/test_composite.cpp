#include <doctest.h>

#include "svs/composite.hpp"
#include "svs/errors.hpp"
#include "svs/random.hpp"
#include "svs/graph.hpp"
#include "svs/dataset.hpp"
#include "svs/oracles.hpp"
#include "svs/spca.hpp"
#include "svs/ssc.hpp"

using namespace svs;

namespace {

AnchoredProblem small_spca(double lambda, std::uint64_t seed, Eigen::Index n = 8,
                           Eigen::Index p = 3) {
  Rng rng(seed);
  return spca_problem(generate_spca(n, p, lambda, 300, seed), random_stiefel(n, p, rng));
}

AnchoredProblem small_ssc(std::uint64_t seed) {
  const Dataset data = make_blobs(5, 2, 2, 6.0, 1.0, seed);
  return ssc_problem(knn_affinity(data, 3, std::nullopt), 2,
                     WeaklyConvexFunction::mcp(0.2, 0.5));
}

double rel(const Vector &a, const Vector &b) { return (a - b).norm() / b.norm(); }

} // namespace

TEST_CASE("surrogate gradient matches finite differences") {
  Rng rng(1);
  for (int s = 0; s < 5; ++s) {
    const auto spca = small_spca(0.1, s);
    const auto basis = oracle::skew_basis(8, 3);
    const SkewParam v = spca.v0 + oracle::random_skew(8, 3, 0.3, rng);
    const auto f = [&](const SkewParam &x) { return surrogate_value(spca.problem, x, {0.05}); };
    CHECK(rel(oracle::fd_coordinates(f, v, basis),
              oracle::coordinates(surrogate_grad(spca.problem, v, {0.05}), basis)) <= 1e-5);

    const auto ssc = small_ssc(s);
    const auto basis2 = oracle::skew_basis(10, 2);
    const SkewParam w = ssc.v0 + oracle::random_skew(10, 2, 0.3, rng);
    const auto f2 = [&](const SkewParam &x) { return surrogate_value(ssc.problem, x, {0.5}); };
    CHECK(rel(oracle::fd_coordinates(f2, w, basis2),
              oracle::coordinates(surrogate_grad(ssc.problem, w, {0.5}), basis2)) <= 1e-5);
  }
}

TEST_CASE("one-pass evaluation agrees with the separate calls") {
  const auto ap = small_spca(0.1, 3);
  Rng rng(3);
  const SkewParam v = oracle::random_skew(8, 3, 0.5, rng);
  const SurrogateEval e = surrogate_eval(ap.problem, v, {0.1});
  CHECK(e.value == doctest::Approx(surrogate_value(ap.problem, v, {0.1})));
  CHECK(norm(e.grad - surrogate_grad(ap.problem, v, {0.1})) < 1e-13);
  CHECK((e.u - cayley_inverse(ap.problem.chart(), v)).norm() < 1e-14);
}

TEST_CASE("surrogate is sandwiched by the true objective") {
  Rng rng(4);
  const auto ap = small_spca(0.3, 4);
  const double lg = ap.problem.g_lipschitz();
  for (int i = 0; i < 20; ++i) {
    const SkewParam v = oracle::random_skew(8, 3, 1.0, rng);
    const double t = true_value(ap.problem, v);
    for (double mu : {0.01, 0.1, 0.4}) {
      const double s = surrogate_value(ap.problem, v, {mu});
      CHECK(s <= t + 1e-12);
      CHECK(t <= s + mu * lg * lg / 2 + 1e-12);
    }
    CHECK(surrogate_value(ap.problem, v, {0.4}) <= surrogate_value(ap.problem, v, {0.1}) + 1e-12);
  }
}

TEST_CASE("without a regularizer the surrogate is h") {
  const auto ap = small_spca(0.0, 5);
  Rng rng(5);
  const SkewParam v = oracle::random_skew(8, 3, 1.0, rng);
  const Matrix u = cayley_inverse(ap.problem.chart(), v);
  CHECK(surrogate_value(ap.problem, v, {0.1}) == doctest::Approx(ap.problem.h().value(u)));
  CHECK(true_value(ap.problem, v) == doctest::Approx(ap.problem.h().value(u)));
  const SkewParam want =
      cayley_adjoint_differential(ap.problem.chart(), v, ap.problem.h().gradient(u));
  CHECK(norm(surrogate_grad(ap.problem, v, {0.1}) - want) < 1e-13);
}

TEST_CASE("identity data gives the closed-form SPCA objective") {
  const SpcaInstance inst = SpcaInstance::from_data(Matrix::Identity(4, 4), 2, 0.3);
  Rng rng(6);
  const auto ap = spca_problem(inst, random_stiefel(4, 2, rng));
  for (int i = 0; i < 10; ++i) {
    const SkewParam v = oracle::random_skew(4, 2, 1.0, rng);
    const Matrix u = cayley_inverse(ap.problem.chart(), v);
    CHECK(true_value(ap.problem, v) == doctest::Approx(-2.0 + 0.3 * u.cwiseAbs().sum()));
  }
}

TEST_CASE("ambient gradient matches finite differences") {
  Rng rng(7);
  const auto ap = small_spca(0.2, 7);
  const Matrix u = random_stiefel(8, 3, rng);
  const Matrix g = ambient_smoothed_grad(ap.problem, u, {0.05});
  const double h = 1e-6;
  for (int k = 0; k < 10; ++k) {
    const Matrix d = rng.normal_matrix(8, 3);
    const double num = (ambient_smoothed_value(ap.problem, u + h * d, {0.05}) -
                        ambient_smoothed_value(ap.problem, u - h * d, {0.05})) / (2 * h);
    CHECK(num == doctest::Approx(frobenius_dot(g, d)).epsilon(1e-5));
  }
}

TEST_CASE("huber regimes of the l1 surrogate gradient") {
  const auto ap = small_spca(0.5, 8);
  Rng rng(8);
  const Matrix u = random_stiefel(8, 3, rng);
  const double mu = 0.01;
  const Matrix g = ambient_smoothed_grad(ap.problem, u, {mu}) - ap.problem.h().gradient(u);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) >= mu * 0.5) {
      CHECK(g(i) == doctest::Approx(0.5 * (u(i) > 0 ? 1 : -1)));
    } else {
      CHECK(g(i) == doctest::Approx(u(i) / mu));
    }
  }
}

TEST_CASE("gram mapping adjoint matches directional differences") {
  Rng rng(9);
  const SmoothMapping s = SmoothMapping::gram();
  const Matrix u = rng.normal_matrix(6, 2);
  const Matrix m = rng.normal_matrix(6, 6);
  const Matrix d = rng.normal_matrix(6, 2);
  const double h = 1e-6;
  const Matrix ds = (s.value(u + h * d) - s.value(u - h * d)) / (2 * h);
  CHECK(frobenius_dot(ds, m) == doctest::Approx(frobenius_dot(d, s.adjoint_differential(u, m))).epsilon(1e-6));
  CHECK(SmoothMapping::identity().identity_flag);
  CHECK_FALSE(s.identity_flag);
}

TEST_CASE("sampled lipschitz model for the gram mapping") {
  Rng rng(10);
  const auto ap = small_ssc(10);
  const LipschitzModel model = estimate_lipschitz_model(
      ap.problem, {random_stiefel(10, 2, rng), random_stiefel(10, 2, rng)}, 50, 1);
  // ||(M + M^T) U|| <= 2 ||M|| on the Stiefel manifold, so varpi2 <= 16.
  CHECK(model.varpi2 > 0.0);
  CHECK(model.varpi2 <= 16.0 + 1e-12);
  CHECK(model.varpi1 == 0.0);
  CHECK(model.at(0.5) > model.at(1.0));

  const auto spca = small_spca(0.1, 10);
  const LipschitzModel id = estimate_lipschitz_model(
      spca.problem, {random_stiefel(8, 3, rng)}, 20, 2);
  CHECK(id.varpi2 == doctest::Approx(4.0));
}

TEST_CASE("shape mismatches are rejected") {
  const auto ap = small_spca(0.1, 11);
  CHECK_THROWS_AS(surrogate_value(ap.problem, SkewParam::zeros(9, 3), {0.1}), InvalidArgument);
  CHECK_THROWS_AS(surrogate_value(ap.problem, ap.v0, {0.0}), InvalidArgument);
  LipschitzModel bad{0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
