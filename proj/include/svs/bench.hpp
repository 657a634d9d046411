#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "svs/vsmooth.hpp"

namespace svs {

enum class Experiment { Spca, Ssc, Selftest };

struct RunConfig {
  Experiment experiment = Experiment::Spca;

  // SPCA: (N, p) pairs.
  std::vector<std::pair<int, int>> sizes{{200, 1}};
  int num_samples = 5000;
  std::vector<std::string> solvers{"vsmooth", "rsub", "rsmooth"};
  double rsub_step_base = 0.99;

  double lambda = 0.1;
  /// MCP shape for SSC; unused for SPCA.
  std::optional<double> theta;
  /// Schedule level. Unset means 1 for l1 and max(lambda, 1) / theta for MCP.
  std::optional<double> eta;
  double alpha = 3.0;
  ArmijoConfig armijo;
  StoppingRule stop;
  std::size_t true_value_every = 1;

  std::vector<std::uint64_t> seeds{0};
  int workers = 1;
  std::filesystem::path output_dir = "out";
  bool write_traces = true;

  // SSC.
  std::string dataset;
  std::optional<std::string> label_column{"label"};
  /// 0 infers K from the labels.
  int clusters = 0;
  int knn = 10;
  std::optional<double> bandwidth;
  std::vector<std::string> methods{"sc", "ssc_l1", "ssc_mcp"};
  bool grid = false;
  std::vector<double> grid_values;
  int kmeans_runs = 100;

  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const RunConfig &config);
RunConfig load_run_config(const std::filesystem::path &path);

Experiment parse_experiment(const std::string &name);
std::string to_string(Experiment experiment);

/// One (size, seed, solver) cell of an SPCA run.
struct SpcaCell {
  int n = 0;
  int p = 0;
  std::uint64_t seed = 0;
  std::string solver;
  double fval = 0.0;
  double feasi = 0.0;
  std::size_t itr = 0;
  double time = 0.0;
  double sparsity = 0.0;
  TerminationReason reason = TerminationReason::MaxIterations;
};

/// Seed-averaged row of the summary file.
struct SpcaSummaryRow {
  int n = 0;
  int p = 0;
  std::string solver;
  double fval = 0.0;
  double feasi = 0.0;
  double itr = 0.0;
  double time = 0.0;
  double sparsity = 0.0;
};

struct SpcaReport {
  std::vector<SpcaCell> cells;
  std::vector<SpcaSummaryRow> summary;
};

/// Runs every (size, seed, solver) cell, sharing one instance and U0 per
/// (size, seed). Writes under output_dir: traces/*.csv, runs.csv (one row
/// per cell), summary.csv (seed means of fval, feasi, itr, sparsity),
/// timing.csv (wall-clock columns) and manifest.json.
SpcaReport run_spca(const RunConfig &config);

struct SscSummaryRow {
  std::string method;
  double lambda = 0.0;
  std::optional<double> theta;
  std::optional<double> nmi_mean;
  std::optional<double> ari_mean;
  std::vector<int> labels;
};

struct SscReport {
  std::vector<SscSummaryRow> rows;
  bool tuned_on_ground_truth = false;
};

/// Writes summary.csv (method, lambda, theta, NMI_mean, ARI_mean),
/// labels.csv (one column per method), grid.csv when sweeping, and
/// manifest.json under output_dir.
SscReport run_ssc(const RunConfig &config);

/// Creates the directory if needed and checks that a file can be written
/// there; throws IoError otherwise.
void ensure_writable_dir(const std::filesystem::path &dir);

} // namespace svs
