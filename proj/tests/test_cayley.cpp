#include <doctest.h>

#include <cmath>

#include "svs/cayley.hpp"
#include "svs/errors.hpp"
#include "svs/oracles.hpp"

using namespace svs;

namespace {

Matrix orth_residual(const Matrix &u) {
  return u.transpose() * u - Matrix::Identity(u.cols(), u.cols());
}

} // namespace

TEST_CASE("inverse transform at the origin returns the first columns of S") {
  Rng rng(1);
  const CayleyChart chart(oracle::random_orthogonal(7, rng), 3);
  const Matrix u = cayley_inverse(chart, SkewParam::zeros(7, 3));
  CHECK((u - chart.S().leftCols(3)).norm() < 1e-14);
  CHECK(singularity_margin(chart, u) == doctest::Approx(2.0));
  CHECK(norm(cayley_forward(chart, u)) < 1e-14);
}

TEST_CASE("inverse transform lands on the Stiefel manifold") {
  Rng rng(2);
  const auto chart = CayleyChart::identity(4, 2);
  for (int i = 0; i < 50; ++i) {
    const SkewParam v = oracle::random_skew(4, 2, 2.0, rng);
    const Matrix u = cayley_inverse(chart, v);
    CHECK(orth_residual(u).norm() <= 1e-12);
    CHECK((u - oracle::dense_cayley_inverse(chart.S(), v)).norm() < 1e-12);
  }
}

TEST_CASE("forward and inverse transforms are mutually inverse") {
  Rng rng(3);
  for (auto [n, p] : {std::pair<Eigen::Index, Eigen::Index>{6, 2}, {9, 4}, {5, 5}}) {
    const CayleyChart chart(oracle::random_orthogonal(n, rng), p);
    for (int i = 0; i < 20; ++i) {
      const SkewParam v = oracle::random_skew(n, p, 0.8, rng);
      const SkewParam back = cayley_forward(chart, cayley_inverse(chart, v));
      CHECK(norm(back - v) <= 1e-10);
      CHECK((back.A + back.A.transpose()).norm() <= 1e-12);
      const Matrix u = random_stiefel(n, p, rng);
      if (singularity_margin(chart, u) > 1e-3) {
        CHECK((cayley_inverse(chart, cayley_forward(chart, u)) - u).norm() <= 1e-10);
      }
    }
  }
}

TEST_CASE("points of the singular set are rejected") {
  // U = S [-I; 0] makes I_p + I^T S^T U vanish.
  Rng rng(4);
  const CayleyChart chart(oracle::random_orthogonal(5, rng), 2);
  Matrix w = Matrix::Zero(5, 2);
  w.topRows(2) = -Matrix::Identity(2, 2);
  const Matrix u = chart.S() * w;
  CHECK(std::abs(singularity_margin(chart, u)) < 1e-12);
  CHECK_THROWS_AS(cayley_forward(chart, u), SingularPointError);
}

TEST_CASE("singularity margin lies in (0, 2] for random points") {
  Rng rng(5);
  const CayleyChart chart(oracle::random_orthogonal(8, rng), 3);
  for (int i = 0; i < 50; ++i) {
    const double m = singularity_margin(chart, random_stiefel(8, 3, rng));
    CHECK(m > 0.0);
    CHECK(m <= 2.0 + 1e-12);
  }
}

TEST_CASE("differential matches central differences and is bounded by 2") {
  Rng rng(6);
  const CayleyChart chart(oracle::random_orthogonal(6, rng), 2);
  CHECK(cayley_differential(chart, oracle::random_skew(6, 2, 1, rng),
                            SkewParam::zeros(6, 2)).norm() == 0.0);
  for (int i = 0; i < 30; ++i) {
    const SkewParam v = oracle::random_skew(6, 2, 1.0, rng);
    SkewParam d = oracle::random_skew(6, 2, 1.0, rng);
    d *= 1.0 / norm(d);
    const double h = 1e-6;
    const Matrix num = (cayley_inverse(chart, v + h * d) - cayley_inverse(chart, v - h * d)) / (2 * h);
    const Matrix an = cayley_differential(chart, v, d);
    CHECK((num - an).norm() <= 1e-6);
    CHECK(an.norm() <= 2.0 + 1e-12);
  }
}

TEST_CASE("adjoint differential satisfies the adjoint identity") {
  Rng rng(7);
  const CayleyChart chart(oracle::random_orthogonal(5, rng), 2);
  for (int i = 0; i < 30; ++i) {
    const SkewParam v = oracle::random_skew(5, 2, 1.0, rng);
    const SkewParam d = oracle::random_skew(5, 2, 1.0, rng);
    const Matrix m = rng.normal_matrix(5, 2);
    CHECK(frobenius_dot(cayley_differential(chart, v, d), m) ==
          doctest::Approx(dot(d, cayley_adjoint_differential(chart, v, m))).epsilon(1e-10));
  }
  CHECK(norm(cayley_adjoint_differential(chart, oracle::random_skew(5, 2, 1, rng),
                                         Matrix::Zero(5, 2))) == 0.0);
}

TEST_CASE("adjoint at the origin of the identity chart") {
  Rng rng(8);
  const auto chart = CayleyChart::identity(5, 2);
  const Matrix m = rng.normal_matrix(5, 2);
  Matrix ext = Matrix::Zero(5, 5);
  ext.leftCols(2) = -2.0 * m;
  const SkewParam want = SkewParam::project(ext, 2);
  CHECK(norm(cayley_adjoint_differential(chart, SkewParam::zeros(5, 2), m) - want) < 1e-13);
}

TEST_CASE("projection onto Q zeroes the lower block and skews") {
  Rng rng(9);
  const Matrix x = rng.normal_matrix(6, 6);
  const SkewParam q = SkewParam::project(x, 2);
  const Matrix d = q.dense();
  CHECK((d + d.transpose()).norm() < 1e-14);
  CHECK(d.bottomRightCorner(4, 4).norm() == 0.0);
  // Orthogonal projection: residual is orthogonal to Q.
  const SkewParam e = oracle::random_skew(6, 2, 1, rng);
  CHECK(std::abs(frobenius_dot(x - d, e.dense())) < 1e-12);
}

TEST_CASE("anchor construction reproduces U0") {
  Rng rng(10);
  {
    const Matrix u0 = Matrix::Identity(6, 2);
    const auto [chart, v0] = chart_from_anchor(u0);
    CHECK((chart.S() - Matrix::Identity(6, 6)).norm() < 1e-14);
    CHECK(norm(v0) < 1e-14);
  }
  for (int i = 0; i < 20; ++i) {
    const Matrix u0 = random_stiefel(6, 2, rng);
    const auto [chart, v0] = chart_from_anchor(u0);
    CHECK((cayley_inverse(chart, v0) - u0).norm() <= 1e-10);
    CHECK((chart.S().transpose() * chart.S() - Matrix::Identity(6, 6)).norm() < 1e-12);
    const Matrix k = Matrix::Identity(2, 2) + (chart.S().transpose() * u0).topRows(2);
    CHECK(k.determinant() > 0.0);
  }
  CHECK_THROWS_AS(chart_from_anchor(2.0 * Matrix::Identity(4, 2)), InvalidArgument);
}

TEST_CASE("differential Lipschitz bound") {
  Rng rng(11);
  const CayleyChart chart(oracle::random_orthogonal(6, rng), 2);
  for (int i = 0; i < 50; ++i) {
    const SkewParam v1 = oracle::random_skew(6, 2, 1.0, rng);
    const SkewParam v2 = v1 + oracle::random_skew(6, 2, 0.3, rng);
    SkewParam d = oracle::random_skew(6, 2, 1.0, rng);
    d *= 1.0 / norm(d);
    const double gap = (cayley_differential(chart, v1, d) - cayley_differential(chart, v2, d)).norm();
    CHECK(gap <= 4.0 * norm(v1 - v2) + 1e-8);
  }
}

TEST_CASE("chart validation") {
  CHECK_THROWS_AS(CayleyChart(Matrix::Identity(4, 4) * 2.0, 2), InvalidArgument);
  CHECK_THROWS_AS(CayleyChart(Matrix::Identity(4, 4), 0), InvalidArgument);
  CHECK_THROWS_AS(CayleyChart(Matrix::Identity(4, 4), 5), InvalidArgument);
  const auto chart = CayleyChart::identity(4, 2);
  CHECK_THROWS_AS(cayley_inverse(chart, SkewParam::zeros(5, 2)), InvalidArgument);
}
