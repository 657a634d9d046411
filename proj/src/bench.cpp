#include "svs/bench.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "svs/errors.hpp"
#include "svs/random.hpp"
#include "svs/riemannian.hpp"
#include "svs/spca.hpp"
#include "svs/ssc.hpp"
#include "svs/trace_io.hpp"

namespace svs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fixed-width scientific format so that summary files do not depend on
// stream state or locale.
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

std::string fmt(const std::optional<double> &x) {
  return x ? fmt(*x) : std::string();
}

template <class T>
void read_opt(const json &j, const char *key, std::optional<T> &out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null())
    out.reset();
  else
    out = j.at(key).get<T>();
}

template <class T> void read(const json &j, const char *key, T &out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T> json opt_json(const std::optional<T> &x) {
  return x ? json(*x) : json(nullptr);
}

void require_keys(const json &j, const std::set<std::string> &allowed,
                  const std::string &where) {
  if (!j.is_object())
    throw InvalidArgument("config: " + where + " must be an object");
  for (const auto &item : j.items())
    if (!allowed.count(item.key()))
      throw InvalidArgument("config: unknown key '" + item.key() + "' in " +
                            where);
}

std::ofstream open_out(const fs::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_out(std::ofstream &out, const fs::path &path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

template <class Task>
void run_pool(std::size_t count, int workers, const Task &task) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  const auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto &t : pool) t.join();
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

void write_manifest(const RunConfig &config, const fs::path &dir,
                    json extra) {
  json m;
  m["config"] = to_json(config);
  for (auto &item : extra.items()) m[item.key()] = item.value();
  const fs::path path = dir / "manifest.json";
  auto out = open_out(path);
  out << m.dump(2) << '\n';
  close_out(out, path);
}

} // namespace

Experiment parse_experiment(const std::string &name) {
  if (name == "spca") return Experiment::Spca;
  if (name == "ssc") return Experiment::Ssc;
  if (name == "selftest") return Experiment::Selftest;
  throw InvalidArgument("unknown experiment '" + name + "'");
}

std::string to_string(Experiment experiment) {
  switch (experiment) {
  case Experiment::Spca:
    return "spca";
  case Experiment::Ssc:
    return "ssc";
  case Experiment::Selftest:
    return "selftest";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (sizes.empty()) throw InvalidArgument("config: sizes must be nonempty");
  for (const auto &[n, p] : sizes)
    if (!(n >= 1 && p >= 1 && p <= n))
      throw InvalidArgument("config: each size needs N >= p >= 1");
  if (num_samples < 1) throw InvalidArgument("config: num_samples must be >= 1");
  for (const auto &s : solvers)
    if (s != "vsmooth" && s != "rsub" && s != "rsmooth")
      throw InvalidArgument("config: unknown solver '" + s + "'");
  if (!(rsub_step_base > 0.0 && rsub_step_base < 1.0))
    throw InvalidArgument("config: rsub_step_base must lie in (0, 1)");
  if (!(lambda >= 0.0)) throw InvalidArgument("config: lambda must be >= 0");
  if (theta && !(*theta > 0.0))
    throw InvalidArgument("config: theta must be positive");
  if (eta && !(*eta > 0.0))
    throw InvalidArgument("config: eta must be positive");
  if (!(alpha >= 1.0)) throw InvalidArgument("config: alpha must be >= 1");
  armijo.validate();
  if (stop.time_budget_seconds && !(*stop.time_budget_seconds > 0.0))
    throw InvalidArgument("config: time budget must be positive");
  if (stop.grad_tolerance && !(*stop.grad_tolerance >= 0.0))
    throw InvalidArgument("config: grad tolerance must be >= 0");
  if (seeds.empty()) throw InvalidArgument("config: seeds must be nonempty");
  if (workers < 1) throw InvalidArgument("config: workers must be >= 1");
  if (knn < 1) throw InvalidArgument("config: knn must be >= 1");
  if (bandwidth && !(*bandwidth > 0.0))
    throw InvalidArgument("config: bandwidth must be positive");
  if (clusters < 0) throw InvalidArgument("config: clusters must be >= 0");
  for (const auto &m : methods)
    if (m != "sc" && m != "ssc_l1" && m != "ssc_mcp")
      throw InvalidArgument("config: unknown method '" + m + "'");
  for (double v : grid_values)
    if (!(v > 0.0)) throw InvalidArgument("config: grid values must be > 0");
  if (kmeans_runs < 1) throw InvalidArgument("config: kmeans_runs must be >= 1");
}

RunConfig run_config_from_json(const json &j) {
  require_keys(j,
               {"experiment", "sizes", "num_samples", "solvers",
                "rsub_step_base", "lambda", "theta", "eta", "alpha", "armijo",
                "stop", "true_value_every", "seeds", "workers", "output_dir",
                "write_traces", "dataset", "label_column", "clusters", "knn",
                "bandwidth", "methods", "grid", "grid_values", "kmeans_runs"},
               "run config");
  RunConfig c;
  try {
    if (j.contains("experiment"))
      c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    read(j, "sizes", c.sizes);
    read(j, "num_samples", c.num_samples);
    read(j, "solvers", c.solvers);
    read(j, "rsub_step_base", c.rsub_step_base);
    read(j, "lambda", c.lambda);
    read_opt(j, "theta", c.theta);
    read_opt(j, "eta", c.eta);
    read(j, "alpha", c.alpha);
    if (j.contains("armijo")) {
      const json &a = j.at("armijo");
      require_keys(a, {"c", "rho", "gamma_initial", "max_trials"}, "armijo");
      read(a, "c", c.armijo.c);
      read(a, "rho", c.armijo.rho);
      read_opt(a, "gamma_initial", c.armijo.gamma_initial);
      read(a, "max_trials", c.armijo.max_trials);
    }
    if (j.contains("stop")) {
      const json &s = j.at("stop");
      require_keys(s, {"max_iterations", "time_budget_seconds", "grad_tolerance"},
                   "stop");
      read(s, "max_iterations", c.stop.max_iterations);
      read_opt(s, "time_budget_seconds", c.stop.time_budget_seconds);
      read_opt(s, "grad_tolerance", c.stop.grad_tolerance);
    }
    read(j, "true_value_every", c.true_value_every);
    read(j, "seeds", c.seeds);
    read(j, "workers", c.workers);
    if (j.contains("output_dir"))
      c.output_dir = j.at("output_dir").get<std::string>();
    read(j, "write_traces", c.write_traces);
    read(j, "dataset", c.dataset);
    read_opt(j, "label_column", c.label_column);
    read(j, "clusters", c.clusters);
    read(j, "knn", c.knn);
    read_opt(j, "bandwidth", c.bandwidth);
    read(j, "methods", c.methods);
    read(j, "grid", c.grid);
    read(j, "grid_values", c.grid_values);
    read(j, "kmeans_runs", c.kmeans_runs);
  } catch (const json::exception &e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const RunConfig &c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["sizes"] = c.sizes;
  j["num_samples"] = c.num_samples;
  j["solvers"] = c.solvers;
  j["rsub_step_base"] = c.rsub_step_base;
  j["lambda"] = c.lambda;
  j["theta"] = opt_json(c.theta);
  j["eta"] = opt_json(c.eta);
  j["alpha"] = c.alpha;
  j["armijo"] = {{"c", c.armijo.c},
                 {"rho", c.armijo.rho},
                 {"gamma_initial", opt_json(c.armijo.gamma_initial)},
                 {"max_trials", c.armijo.max_trials}};
  j["stop"] = {{"max_iterations", c.stop.max_iterations},
               {"time_budget_seconds", opt_json(c.stop.time_budget_seconds)},
               {"grad_tolerance", opt_json(c.stop.grad_tolerance)}};
  j["true_value_every"] = c.true_value_every;
  j["seeds"] = c.seeds;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir.string();
  j["write_traces"] = c.write_traces;
  j["dataset"] = c.dataset;
  j["label_column"] = opt_json(c.label_column);
  j["clusters"] = c.clusters;
  j["knn"] = c.knn;
  j["bandwidth"] = opt_json(c.bandwidth);
  j["methods"] = c.methods;
  j["grid"] = c.grid;
  j["grid_values"] = c.grid_values;
  j["kmeans_runs"] = c.kmeans_runs;
  return j;
}

RunConfig load_run_config(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ParseError("config " + path.string() + ": " + e.what(),
                     e.byte);
  }
  return run_config_from_json(j);
}

void ensure_writable_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

SpcaReport run_spca(const RunConfig &config) {
  config.validate();
  const fs::path dir = config.output_dir;
  ensure_writable_dir(dir);
  if (config.write_traces) ensure_writable_dir(dir / "traces");

  struct Group {
    int n, p;
    std::uint64_t seed;
    std::unique_ptr<AnchoredProblem> problem;
    StiefelPoint u0;
  };
  std::vector<Group> groups;
  for (const auto &[n, p] : config.sizes)
    for (std::uint64_t seed : config.seeds) {
      Group g{n, p, seed, nullptr, {}};
      const SpcaInstance inst =
          generate_spca(n, p, config.lambda, config.num_samples, seed);
      // U0 comes from its own stream so that it does not depend on the
      // number of samples drawn for the data matrix.
      Rng rng(derive_seed(seed, 1));
      g.u0 = random_stiefel(n, p, rng);
      g.problem = std::make_unique<AnchoredProblem>(spca_problem(inst, g.u0));
      groups.push_back(std::move(g));
    }

  SpcaReport report;
  std::vector<std::pair<std::size_t, std::string>> jobs;
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    for (const auto &s : config.solvers) jobs.emplace_back(gi, s);
  report.cells.resize(jobs.size());

  const SmoothingSchedule schedule =
      SmoothingSchedule::standard(config.eta.value_or(1.0), config.alpha);

  run_pool(jobs.size(), config.workers, [&](std::size_t i) {
    const Group &g = groups[jobs[i].first];
    const std::string &solver = jobs[i].second;
    const CompositeProblem &problem = g.problem->problem;
    SolverTrace trace;
    if (solver == "vsmooth") {
      VSmoothOptions o;
      o.schedule = schedule;
      o.armijo = config.armijo;
      o.stop = config.stop;
      o.true_value_every = config.true_value_every;
      trace = vsmooth_run(problem, g.problem->v0, o);
    } else if (solver == "rsub") {
      RSubOptions o;
      o.step_base = config.rsub_step_base;
      o.stop = config.stop;
      trace = rsub_run(problem, g.u0, o);
    } else {
      RSmoothOptions o;
      o.schedule = schedule;
      o.armijo = config.armijo;
      o.stop = config.stop;
      trace = rsmooth_run(problem, g.u0, o);
    }
    SpcaCell &cell = report.cells[i];
    cell.n = g.n;
    cell.p = g.p;
    cell.seed = g.seed;
    cell.solver = solver;
    cell.fval = ambient_true_value(problem, trace.final_u);
    cell.feasi = feasibility(trace.final_u);
    cell.itr = trace.iterations();
    cell.time = trace.records.empty() ? 0.0 : trace.records.back().elapsed_s;
    cell.sparsity = sparsity(trace.final_u);
    cell.reason = trace.reason;
    if (config.write_traces) {
      std::ostringstream name;
      name << "N" << g.n << "_p" << g.p << "_seed" << g.seed << "_" << solver
           << ".csv";
      write_trace_csv(trace, (dir / "traces" / name.str()).string());
    }
  });

  // Seed means per (size, solver), in config order.
  for (const auto &[n, p] : config.sizes)
    for (const auto &s : config.solvers) {
      SpcaSummaryRow row{n, p, s, 0, 0, 0, 0, 0};
      double count = 0;
      for (const auto &c : report.cells)
        if (c.n == n && c.p == p && c.solver == s) {
          row.fval += c.fval;
          row.feasi += c.feasi;
          row.itr += static_cast<double>(c.itr);
          row.time += c.time;
          row.sparsity += c.sparsity;
          ++count;
        }
      row.fval /= count;
      row.feasi /= count;
      row.itr /= count;
      row.time /= count;
      row.sparsity /= count;
      report.summary.push_back(row);
    }

  {
    const fs::path path = dir / "summary.csv";
    auto out = open_out(path);
    out << "N,p,algorithm,fval,feasi,itr,sparsity\n";
    for (const auto &r : report.summary)
      out << r.n << ',' << r.p << ',' << r.solver << ',' << fmt(r.fval) << ','
          << fmt(r.feasi) << ',' << fmt(r.itr) << ',' << fmt(r.sparsity)
          << '\n';
    close_out(out, path);
  }
  {
    const fs::path path = dir / "runs.csv";
    auto out = open_out(path);
    out << "N,p,seed,algorithm,fval,feasi,itr,sparsity,reason\n";
    for (const auto &c : report.cells)
      out << c.n << ',' << c.p << ',' << c.seed << ',' << c.solver << ','
          << fmt(c.fval) << ',' << fmt(c.feasi) << ',' << c.itr << ','
          << fmt(c.sparsity) << ',' << to_string(c.reason) << '\n';
    close_out(out, path);
  }
  {
    const fs::path path = dir / "timing.csv";
    auto out = open_out(path);
    out << "N,p,seed,algorithm,time\n";
    for (const auto &c : report.cells)
      out << c.n << ',' << c.p << ',' << c.seed << ',' << c.solver << ','
          << fmt(c.time) << '\n';
    close_out(out, path);
  }
  write_manifest(config, dir,
                 {{"files", {"summary.csv", "runs.csv", "timing.csv"}},
                  {"traces", config.write_traces}});
  return report;
}

SscReport run_ssc(const RunConfig &config) {
  config.validate();
  if (config.dataset.empty())
    throw InvalidArgument("run_ssc: no dataset path given");
  const fs::path dir = config.output_dir;
  ensure_writable_dir(dir);

  const Dataset data =
      read_dataset_csv(config.dataset, config.label_column, config.clusters);
  const int k = config.clusters > 0 ? config.clusters : data.k;
  if (k < 2)
    throw InvalidArgument("run_ssc: clustering needs K >= 2 (got " +
                          std::to_string(k) + ")");
  if (config.grid && !data.labels)
    throw InvalidArgument(
        "run_ssc: the grid sweep selects parameters with ground-truth "
        "labels, but the dataset has none");

  const GraphMatrices graph = knn_affinity(data, config.knn, config.bandwidth);
  SscConfig sc;
  sc.knn = config.knn;
  sc.bandwidth = config.bandwidth;
  sc.alpha = config.alpha;
  sc.eta = config.eta;
  sc.armijo = config.armijo;
  sc.stop = config.stop;
  sc.kmeans_runs = config.kmeans_runs;
  sc.seed = config.seeds.front();

  const std::vector<double> grid_values =
      config.grid_values.empty() ? default_parameter_grid() : config.grid_values;

  SscReport report;
  report.tuned_on_ground_truth = config.grid;
  std::vector<std::pair<std::string, GridResult>> sweeps;

  for (const auto &method : config.methods) {
    SscSummaryRow row;
    row.method = method;
    std::optional<WeaklyConvexFunction> g;
    if (method == "sc") {
      row.lambda = 0.0;
    } else {
      const PenaltyKind kind =
          method == "ssc_l1" ? PenaltyKind::L1 : PenaltyKind::MCP;
      double lambda = config.lambda;
      std::optional<double> theta = config.theta;
      if (config.grid) {
        GridResult sweep = ssc_grid_search(data, graph, k, kind, grid_values,
                                           sc, config.workers);
        lambda = sweep.best.lambda;
        if (kind == PenaltyKind::MCP) theta = sweep.best.theta;
        sweeps.emplace_back(method, std::move(sweep));
      } else if (kind == PenaltyKind::MCP && !theta) {
        throw InvalidArgument("run_ssc: ssc_mcp needs theta or a grid sweep");
      }
      row.lambda = lambda;
      if (kind == PenaltyKind::L1) {
        g = WeaklyConvexFunction::l1(lambda);
      } else {
        row.theta = theta;
        g = WeaklyConvexFunction::mcp(lambda, *theta);
      }
    }
    const SscResult r = ssc_run(data, graph, k, g, sc);
    row.nmi_mean = r.scores.nmi_mean;
    row.ari_mean = r.scores.ari_mean;
    row.labels = r.scores.labels;
    report.rows.push_back(std::move(row));
  }

  {
    const fs::path path = dir / "summary.csv";
    auto out = open_out(path);
    out << "method,lambda,theta,NMI_mean,ARI_mean\n";
    for (const auto &r : report.rows)
      out << r.method << ',' << fmt(r.lambda) << ',' << fmt(r.theta) << ','
          << fmt(r.nmi_mean) << ',' << fmt(r.ari_mean) << '\n';
    close_out(out, path);
  }
  {
    const fs::path path = dir / "labels.csv";
    auto out = open_out(path);
    for (std::size_t m = 0; m < report.rows.size(); ++m)
      out << (m ? "," : "") << report.rows[m].method;
    out << '\n';
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      for (std::size_t m = 0; m < report.rows.size(); ++m)
        out << (m ? "," : "") << report.rows[m].labels[i];
      out << '\n';
    }
    close_out(out, path);
  }
  json files = {"summary.csv", "labels.csv"};
  if (!sweeps.empty()) {
    const fs::path path = dir / "grid.csv";
    auto out = open_out(path);
    out << "method,lambda,theta,NMI_mean,ARI_mean,status\n";
    for (const auto &[method, sweep] : sweeps)
      for (const auto &c : sweep.cells) {
        out << method << ',' << fmt(c.lambda) << ','
            << (method == "ssc_mcp" ? fmt(c.theta) : std::string()) << ',';
        if (c.failure)
          out << ",,failed";
        else
          out << fmt(c.nmi) << ',' << fmt(c.ari) << ",ok";
        out << '\n';
      }
    close_out(out, path);
    files.push_back("grid.csv");
  }
  write_manifest(config, dir,
                 {{"files", files},
                  {"clusters", k},
                  {"tuned_on_ground_truth", report.tuned_on_ground_truth}});
  return report;
}

} // namespace svs
