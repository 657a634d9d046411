#include "svs/ssc.hpp"

#include <atomic>
#include <exception>
#include <memory>
#include <numeric>
#include <thread>

#include "svs/errors.hpp"
#include "svs/random.hpp"

namespace svs {

AnchoredProblem ssc_problem(const GraphMatrices &graph, const StiefelPoint &u0,
                            const WeaklyConvexFunction &g) {
  if (u0.rows() != graph.l.rows())
    throw InvalidArgument("ssc_problem: U0 row count does not match graph");
  auto lap = std::make_shared<const Matrix>(graph.l);
  SmoothFunction h;
  h.value = [lap](const Matrix &u) {
    return (u.transpose() * (*lap * u)).trace();
  };
  h.gradient = [lap](const Matrix &u) -> Matrix { return 2.0 * (*lap * u); };
  // ||L||_2 <= 2 for a normalized Laplacian.
  h.grad_lipschitz = 4.0;
  auto [chart, v0] = chart_from_anchor(u0);
  return {CompositeProblem(std::move(h), SmoothMapping::gram(), g,
                           std::move(chart)),
          std::move(v0)};
}

AnchoredProblem ssc_problem(const GraphMatrices &graph, int k,
                            const WeaklyConvexFunction &g) {
  return ssc_problem(graph, sc_embed(graph, k), g);
}

ClusterScores cluster_embedding(const StiefelPoint &u,
                                const std::optional<std::vector<int>> &truth,
                                int k, int runs, std::uint64_t seed) {
  if (runs < 1) throw InvalidArgument("cluster_embedding: runs must be >= 1");
  const Matrix rows = row_normalize(u);
  ClusterScores out;
  double best_inertia = std::numeric_limits<double>::infinity();
  double nmi_sum = 0.0, ari_sum = 0.0;
  for (int r = 0; r < runs; ++r) {
    KMeansResult km = kmeans(rows, k, 1, derive_seed(seed, r));
    if (truth) {
      nmi_sum += nmi(*truth, km.labels);
      ari_sum += ari(*truth, km.labels);
    }
    if (km.inertia < best_inertia) {
      best_inertia = km.inertia;
      out.labels = std::move(km.labels);
    }
  }
  if (truth) {
    out.nmi_mean = nmi_sum / runs;
    out.ari_mean = ari_sum / runs;
  }
  return out;
}

SscResult ssc_run(const Dataset &data, const GraphMatrices &graph, int k,
                  const std::optional<WeaklyConvexFunction> &g,
                  const SscConfig &config) {
  if (k < 2) throw InvalidArgument("ssc_run: need K >= 2 clusters");
  if (k > data.size()) throw InvalidArgument("ssc_run: K exceeds N");
  SscResult out;
  const StiefelPoint u0 = sc_embed(graph, k);
  if (!g || g->lambda() == 0.0) {
    out.embedding = u0;
  } else {
    auto anchored = ssc_problem(graph, u0, *g);
    VSmoothOptions opts;
    opts.schedule = SmoothingSchedule::standard(
        config.eta.value_or(schedule_eta(*g)), config.alpha);
    opts.armijo = config.armijo;
    opts.stop = config.stop;
    SolverTrace trace = vsmooth_run(anchored.problem, anchored.v0, opts);
    out.embedding = trace.final_u;
    out.trace = std::move(trace);
  }
  out.scores = cluster_embedding(out.embedding, data.labels, k,
                                 config.kmeans_runs, config.seed);
  return out;
}

SscResult ssc_run(const Dataset &data, int k,
                  const std::optional<WeaklyConvexFunction> &g,
                  const SscConfig &config) {
  return ssc_run(data, knn_affinity(data, config.knn, config.bandwidth), k, g,
                 config);
}

std::vector<double> default_parameter_grid() {
  return {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

GridResult ssc_grid_search(const Dataset &data, const GraphMatrices &graph,
                           int k, PenaltyKind kind,
                           const std::vector<double> &grid,
                           const SscConfig &config, int workers) {
  if (!data.labels)
    throw InvalidArgument("ssc_grid_search: model selection needs labels");
  if (grid.empty()) throw InvalidArgument("ssc_grid_search: empty grid");
  GridResult result;
  for (double lambda : grid) {
    if (kind == PenaltyKind::L1) {
      result.cells.push_back({lambda, 0.0, 0.0, 0.0, std::nullopt});
    } else {
      for (double theta : grid)
        result.cells.push_back({lambda, theta, 0.0, 0.0, std::nullopt});
    }
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(result.cells.size());
  const auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < result.cells.size();) {
      GridCell &cell = result.cells[i];
      try {
        const auto g = kind == PenaltyKind::L1
                           ? WeaklyConvexFunction::l1(cell.lambda)
                           : WeaklyConvexFunction::mcp(cell.lambda, cell.theta);
        const SscResult r = ssc_run(data, graph, k, g, config);
        cell.nmi = *r.scores.nmi_mean;
        cell.ari = *r.scores.ari_mean;
      } catch (const std::exception &e) {
        cell.failure = e.what();
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, workers);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }

  const GridCell *best = nullptr;
  for (const auto &cell : result.cells)
    if (!cell.failure && (!best || cell.score() > best->score())) best = &cell;
  if (!best) std::rethrow_exception(errors.front());
  result.best = *best;
  return result;
}

} // namespace svs
