#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "svs/bench.hpp"
#include "svs/errors.hpp"
#include "svs/random.hpp"
#include "svs/prox.hpp"
#include "svs/selftest.hpp"

using namespace svs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("svs_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_spca(const fs::path &out) {
  RunConfig c;
  c.sizes = {{12, 2}};
  c.num_samples = 50;
  c.stop.max_iterations = 40;
  c.seeds = {0, 1};
  c.output_dir = out;
  return c;
}

} // namespace

TEST_CASE("run config json round trip and strict keys") {
  RunConfig c;
  c.sizes = {{50, 2}, {100, 1}};
  c.theta = 0.01;
  c.seeds = {3, 4};
  c.armijo.c = 1e-3;
  c.stop.max_iterations = 77;
  c.stop.time_budget_seconds = 5.0;
  const RunConfig back = run_config_from_json(to_json(c));
  CHECK(back.sizes == c.sizes);
  CHECK(back.theta == c.theta);
  CHECK(back.seeds == c.seeds);
  CHECK(back.armijo.c == 1e-3);
  CHECK(back.stop.max_iterations == 77);
  CHECK(back.stop.time_budget_seconds == 5.0);
  CHECK(to_json(back) == to_json(c));

  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"lamda", 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"stop", {{"iters", 3}}}}), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json{{"workers", 0}}), InvalidArgument);
  CHECK(parse_experiment("ssc") == Experiment::Ssc);
  CHECK_THROWS_AS(parse_experiment("nope"), InvalidArgument);
}

TEST_CASE("malformed config file") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{ \"lambda\": ";
  CHECK_THROWS_AS(load_run_config(dir / "bad.json"), ParseError);
  CHECK_THROWS_AS(load_run_config(dir / "missing.json"), IoError);
}

TEST_CASE("spca run writes its outputs") {
  const fs::path out = scratch("spca");
  const SpcaReport r = run_spca(small_spca(out));
  CHECK(r.cells.size() == 6);
  REQUIRE(r.summary.size() == 3);
  for (const auto &row : r.summary) {
    CHECK(row.feasi < 1e-10);
    CHECK(row.itr == 40.0);
  }
  for (const char *f : {"summary.csv", "runs.csv", "timing.csv", "manifest.json",
                        "traces/N12_p2_seed0_vsmooth.csv", "traces/N12_p2_seed1_rsub.csv"})
    CHECK_MESSAGE(fs::exists(out / f), f);
  const std::string summary = slurp(out / "summary.csv");
  CHECK(summary.rfind("N,p,algorithm,fval,feasi,itr,sparsity\n", 0) == 0);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.contains("config"));
}

TEST_CASE("spca runs are deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  auto ca = small_spca(a), cb = small_spca(b);
  cb.workers = 3;
  run_spca(ca);
  run_spca(cb);
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(slurp(a / "runs.csv") == slurp(b / "runs.csv"));
}

TEST_CASE("unwritable output directory") {
  const fs::path dir = scratch("file");
  std::ofstream(dir) << "x";
  auto c = small_spca(dir / "sub");
  CHECK_THROWS_AS(run_spca(c), IoError);
  CHECK_THROWS_AS(ensure_writable_dir(dir / "sub"), IoError);
}

TEST_CASE("ssc run with and without labels") {
  const fs::path dir = scratch("ssc");
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "pts.csv");
    csv << "x,y,label\n";
    const double c[3][2] = {{0, 0}, {10, 0}, {5, 9}};
    Rng rng(1);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 15; ++i)
        csv << c[k][0] + rng.normal() << ',' << c[k][1] + rng.normal() << ',' << k << '\n';
  }
  RunConfig cfg;
  cfg.experiment = Experiment::Ssc;
  cfg.dataset = (dir / "pts.csv").string();
  cfg.knn = 5;
  cfg.kmeans_runs = 5;
  cfg.stop.max_iterations = 30;
  cfg.lambda = 1e-3;
  cfg.theta = 0.1;
  cfg.output_dir = dir / "out";
  const SscReport r = run_ssc(cfg);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].method == "sc");
  CHECK(r.rows[0].nmi_mean.has_value());
  CHECK_FALSE(r.tuned_on_ground_truth);
  CHECK(fs::exists(dir / "out" / "labels.csv"));

  cfg.label_column.reset();
  cfg.clusters = 3;
  cfg.output_dir = dir / "out2";
  const SscReport u = run_ssc(cfg);
  for (const auto &row : u.rows) {
    CHECK_FALSE(row.nmi_mean.has_value());
    CHECK(row.labels.size() == 45);
  }
  CHECK(slurp(dir / "out2" / "summary.csv").find(",,") != std::string::npos);

  cfg.grid = true;
  CHECK_THROWS_AS(run_ssc(cfg), InvalidArgument);
  cfg.grid = false;
  cfg.clusters = 1;
  CHECK_THROWS_AS(run_ssc(cfg), InvalidArgument);

  std::ofstream(dir / "bad.csv") << "x,y\n1,2\n3,zz\n";
  cfg.dataset = (dir / "bad.csv").string();
  cfg.clusters = 2;
  try {
    run_ssc(cfg);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("selftest passes and catches a broken prox") {
  const SelftestReport ok = run_selftest();
  CHECK(ok.passed());
  CHECK(format_report(ok).find("prox_oracle") != std::string::npos);

  SelftestOptions broken = default_selftest_options();
  broken.prox_mcp = [](const Matrix &z, double t, double lambda, double theta) {
    // Drops the 1/(1 - t lambda/theta) rescaling of the middle region.
    Matrix out = prox_mcp(z, t, lambda, theta);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double a = std::abs(z(i));
      if (a > t * lambda && a < theta) out(i) = (z(i) > 0 ? 1 : -1) * (a - t * lambda);
    }
    return out;
  };
  const SelftestReport bad = run_selftest(broken);
  CHECK_FALSE(bad.passed());
  bool prox_failed = false;
  for (const auto &s : bad.suites)
    if (s.name == "prox_oracle") prox_failed = !s.passed;
  CHECK(prox_failed);
}
