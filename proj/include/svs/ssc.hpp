#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svs/clustering.hpp"
#include "svs/graph.hpp"
#include "svs/vsmooth.hpp"

namespace svs {

/// min Tr(U^T L U) + g(U U^T) over St(K,N), anchored at u0.
AnchoredProblem ssc_problem(const GraphMatrices &graph, const StiefelPoint &u0,
                            const WeaklyConvexFunction &g);
/// Same, anchored at the spectral embedding sc_embed(graph, k).
AnchoredProblem ssc_problem(const GraphMatrices &graph, int k,
                            const WeaklyConvexFunction &g);

struct SscConfig {
  int knn = 10;
  std::optional<double> bandwidth;
  double alpha = 3.0;
  /// Overrides schedule_eta(g) when set.
  std::optional<double> eta;
  ArmijoConfig armijo;
  StoppingRule stop{2000, std::nullopt, std::nullopt};
  int kmeans_runs = 100;
  std::uint64_t seed = 0;
};

struct ClusterScores {
  /// Labels of the lowest-inertia k-means run.
  std::vector<int> labels;
  /// Averages over the k-means runs; present when ground truth exists.
  std::optional<double> nmi_mean;
  std::optional<double> ari_mean;
};

/// Row-normalizes the embedding and runs k-means runs times (one k-means++
/// start each, independent derived streams).
ClusterScores cluster_embedding(const StiefelPoint &u,
                                const std::optional<std::vector<int>> &truth,
                                int k, int runs, std::uint64_t seed);

struct SscResult {
  ClusterScores scores;
  StiefelPoint embedding;
  /// Absent for plain spectral clustering (no regularizer).
  std::optional<SolverTrace> trace;
};

/// Spectral clustering pipeline; with a regularizer the embedding step is
/// replaced by VSmooth on the sparse spectral clustering objective,
/// started from the spectral embedding.
SscResult ssc_run(const Dataset &data, const GraphMatrices &graph, int k,
                  const std::optional<WeaklyConvexFunction> &g,
                  const SscConfig &config);
SscResult ssc_run(const Dataset &data, int k,
                  const std::optional<WeaklyConvexFunction> &g,
                  const SscConfig &config);

struct GridCell {
  double lambda = 0.0;
  double theta = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  /// Set when the cell produced no clustering, e.g. an embedding row was
  /// driven to zero; such cells never win.
  std::optional<std::string> failure;

  double score() const { return 0.5 * (nmi + ari); }
};

struct GridResult {
  std::vector<GridCell> cells;
  GridCell best;
};

/// {10^-i : i = 0..6}.
std::vector<double> default_parameter_grid();

/// Sweeps lambda (and theta for MCP) over the grid and keeps the cell with
/// the highest (NMI + ARI) / 2. Model selection uses the ground-truth
/// labels, so data must carry labels. Throws the first cell error if every
/// cell fails.
GridResult ssc_grid_search(const Dataset &data, const GraphMatrices &graph,
                           int k, PenaltyKind kind,
                           const std::vector<double> &grid,
                           const SscConfig &config, int workers = 1);

} // namespace svs
