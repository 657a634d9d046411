#include <doctest.h>

#include <set>
#include <sstream>

#include "svs/errors.hpp"
#include "svs/random.hpp"
#include "svs/oracles.hpp"
#include "svs/ssc.hpp"

using namespace svs;

namespace {

Dataset line_points() {
  Dataset d;
  d.points.resize(4, 1);
  d.points << 0.0, 1.0, 3.0, 7.0;
  return d;
}

} // namespace

TEST_CASE("knn affinity on a small line") {
  const GraphMatrices g = knn_affinity(line_points(), 1, 1.0);
  // Nearest neighbours: 0->1, 1->0, 2->1, 3->2; symmetrized union.
  CHECK(g.w(0, 1) == doctest::Approx(std::exp(-0.5)));
  CHECK(g.w(1, 2) == doctest::Approx(std::exp(-2.0)));
  CHECK(g.w(2, 3) == doctest::Approx(std::exp(-8.0)));
  CHECK(g.w(0, 2) == 0.0);
  CHECK(g.w(0, 3) == 0.0);
  CHECK((g.w - g.w.transpose()).norm() == 0.0);
  CHECK(g.w.diagonal().norm() == 0.0);
  CHECK(g.degree(1) == doctest::Approx(std::exp(-0.5) + std::exp(-2.0)));
  CHECK_THROWS_AS(knn_affinity(line_points(), 4), InvalidArgument);
  CHECK_THROWS_AS(knn_affinity(line_points(), 1, 0.0), InvalidArgument);
}

TEST_CASE("local scaling bandwidth") {
  const GraphMatrices g = knn_affinity(line_points(), 2);
  // sigma_i is the distance to the first neighbour: 1, 1, 2, 4.
  CHECK(g.w(0, 1) == doctest::Approx(std::exp(-1.0 / 2.0)));
  CHECK(g.w(2, 3) == doctest::Approx(std::exp(-16.0 / 16.0)));
  CHECK(g.w(0, 2) == doctest::Approx(std::exp(-9.0 / 4.0)));
}

TEST_CASE("normalized laplacian spectrum") {
  const Dataset data = make_blobs(10, 3, 2, 8.0, 1.0, 2);
  const GraphMatrices g = knn_affinity(data, 5);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(g.l);
  CHECK(eig.eigenvalues().minCoeff() > -1e-12);
  CHECK(eig.eigenvalues().maxCoeff() < 2.0 + 1e-12);
  CHECK(std::abs((g.degree.cwiseSqrt().transpose() * g.l * g.degree.cwiseSqrt())(0)) < 1e-10);

  const StiefelPoint u = sc_embed(g, 3);
  CHECK((u.transpose() * u - Matrix::Identity(3, 3)).norm() < 1e-12);
  // Tr(U^T L U) equals the sum of the three smallest eigenvalues.
  CHECK((u.transpose() * g.l * u).trace() ==
        doctest::Approx(eig.eigenvalues().head(3).sum()).epsilon(1e-10));
  CHECK_THROWS_AS(sc_embed(g, 0), InvalidArgument);
}

TEST_CASE("row normalize") {
  Matrix u(2, 2);
  u << 3.0, 4.0, 0.0, -2.0;
  const Matrix r = row_normalize(u);
  CHECK(r(0, 0) == doctest::Approx(0.6));
  CHECK(r(1, 1) == doctest::Approx(-1.0));
  u.row(1).setZero();
  try {
    row_normalize(u);
    FAIL("expected a degenerate embedding error");
  } catch (const DegenerateEmbeddingError &e) {
    CHECK(e.row == 1);
  }
}

TEST_CASE("kmeans separates well separated groups") {
  const Dataset data = make_blobs(20, 3, 2, 20.0, 1.0, 4);
  const KMeansResult km = kmeans(data.points, 3, 5, 11);
  CHECK(ari(*data.labels, km.labels) == doctest::Approx(1.0));
  for (std::size_t i = 1; i < km.inertia_history.size(); ++i)
    CHECK(km.inertia_history[i] <= km.inertia_history[i - 1] + 1e-9);
  CHECK(km.inertia == doctest::Approx(km.inertia_history.back()));
  CHECK_THROWS_AS(kmeans(data.points, 61, 1, 1), InvalidArgument);
}

TEST_CASE("nmi and ari small examples") {
  const std::vector<int> a{0, 0, 1, 1}, b{0, 0, 1, 2}, c{1, 1, 0, 0};
  CHECK(nmi(a, b) == doctest::Approx(std::sqrt(std::log(2.0) / (1.5 * std::log(2.0)))));
  CHECK(ari(a, b) == doctest::Approx(4.0 / 7.0));
  CHECK(nmi(a, c) == doctest::Approx(1.0));
  CHECK(ari(a, c) == doctest::Approx(1.0));
  CHECK(nmi(a, std::vector<int>{0, 1, 0, 1}) == doctest::Approx(0.0));
  CHECK(nmi(a, std::vector<int>{0, 0, 0, 0}) == 0.0);
  CHECK(nmi(std::vector<int>{2, 2}, std::vector<int>{5, 5}) == 1.0);
  CHECK_THROWS_AS(ari(a, std::vector<int>{0}), InvalidArgument);
}

TEST_CASE("ari of random labelings is near zero") {
  Rng rng(12);
  double total = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<int> x(300), y(300);
    for (auto &v : x) v = static_cast<int>(rng.below(3));
    for (auto &v : y) v = static_cast<int>(rng.below(3));
    total += ari(x, y);
  }
  CHECK(std::abs(total / 20) <= 0.05);
}

TEST_CASE("dataset csv parsing") {
  std::stringstream ss("x,y,label\n1,2,7\n3,4,3\n5,6,7\n");
  const Dataset d = read_dataset_csv(ss, std::string("label"));
  CHECK(d.size() == 3);
  CHECK(d.k == 2);
  CHECK(*d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.points(2, 1) == 6.0);

  std::stringstream bad("x,y\n1,2\n3,oops\n");
  try {
    read_dataset_csv(bad, std::nullopt);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line == 3);
  }
  std::stringstream nolab("x,y\n1,2\n3,4\n");
  CHECK_FALSE(read_dataset_csv(nolab, std::string("label")).labels.has_value());
  const Dataset sub = subsample_rows(make_blobs(10, 2, 2, 5.0, 1.0, 1), 7, 3);
  CHECK(sub.size() == 7);
}

TEST_CASE("ssc objective gradient uses the laplacian") {
  const Dataset data = make_blobs(6, 2, 2, 6.0, 1.0, 5);
  const GraphMatrices g = knn_affinity(data, 3);
  const auto ap = ssc_problem(g, 2, WeaklyConvexFunction::l1(0.1));
  const Matrix u = cayley_inverse(ap.problem.chart(), ap.v0);
  CHECK((u - sc_embed(g, 2)).norm() < 1e-10);
  CHECK((ap.problem.h().gradient(u) - 2.0 * g.l * u).norm() < 1e-14);
  CHECK(ap.problem.target_size() == 144);
  CHECK(ambient_true_value(ap.problem, u) ==
        doctest::Approx((u.transpose() * g.l * u).trace() + 0.1 * (u * u.transpose()).cwiseAbs().sum()));
}

TEST_CASE("pipeline on gaussian blobs") {
  const Dataset data = make_blobs(30, 3, 2, 10.0, 1.0, 1);
  SscConfig cfg;
  cfg.kmeans_runs = 10;
  cfg.stop.max_iterations = 100;
  const SscResult sc = ssc_run(data, 3, std::nullopt, cfg);
  CHECK(*sc.scores.nmi_mean == doctest::Approx(1.0));
  CHECK_FALSE(sc.trace.has_value());
  const SscResult l1 = ssc_run(data, 3, WeaklyConvexFunction::l1(1e-3), cfg);
  REQUIRE(l1.trace.has_value());
  CHECK(l1.trace->iterations() == 100);
  CHECK((l1.embedding.transpose() * l1.embedding - Matrix::Identity(3, 3)).norm() < 1e-10);
  CHECK(*l1.scores.ari_mean >= 0.9);
  CHECK(std::set<int>(l1.scores.labels.begin(), l1.scores.labels.end()).size() == 3);
  CHECK_THROWS_AS(ssc_run(data, 1, std::nullopt, cfg), InvalidArgument);
}

TEST_CASE("grid search needs labels and picks a passing cell") {
  Dataset data = make_blobs(15, 2, 2, 10.0, 1.0, 2);
  const GraphMatrices g = knn_affinity(data, 5);
  SscConfig cfg;
  cfg.kmeans_runs = 5;
  cfg.stop.max_iterations = 30;
  const GridResult r = ssc_grid_search(data, g, 2, PenaltyKind::MCP, {1e-2, 1e-4}, cfg, 2);
  CHECK(r.cells.size() == 4);
  for (const auto &c : r.cells)
    if (!c.failure) CHECK(r.best.score() >= c.score());
  const GridResult l1 = ssc_grid_search(data, g, 2, PenaltyKind::L1, {1e-2, 1e-4}, cfg);
  CHECK(l1.cells.size() == 2);
  data.labels.reset();
  CHECK_THROWS_AS(ssc_grid_search(data, g, 2, PenaltyKind::L1, {1e-2}, cfg), InvalidArgument);
  CHECK(default_parameter_grid().size() == 7);
}
