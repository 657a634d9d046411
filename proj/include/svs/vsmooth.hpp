#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "svs/composite.hpp"

namespace svs {

/// mu_n = scale * n^(-1/alpha), with scale <= 1/(2 eta). Nonincreasing,
/// nonsummable, and mu_n / mu_{n+1} <= 2^(1/alpha).
struct SmoothingSchedule {
  double eta = 1.0;
  double alpha = 3.0;
  double scale = 0.5;

  static SmoothingSchedule standard(double eta, double alpha = 3.0);
  void validate() const;
  /// Bound M on mu_n / mu_{n+1}.
  double ratio_bound() const;
};

double mu_at(const SmoothingSchedule &schedule, std::size_t n);

/// Weak-convexity level handed to the schedule: 1 for l1 (convex, so any
/// positive value is admissible) and max(lambda, 1) / theta for MCP, which
/// is 1/theta on the usual lambda <= 1 range and never below lambda/theta.
double schedule_eta(const WeaklyConvexFunction &g);

struct ArmijoConfig {
  double c = 0x1p-13;
  double rho = 0.5;
  /// Defaults to min(1, 1/||grad of f_1 o F at V0||) when unset.
  std::optional<double> gamma_initial;
  int max_trials = 60;

  void validate() const;
};

struct StoppingRule {
  std::size_t max_iterations = 10000;
  std::optional<double> time_budget_seconds;
  std::optional<double> grad_tolerance;
};

/// Stalled: a line search failed while the demanded Armijo decrease was
/// below the rounding level of the objective value.
enum class TerminationReason { MaxIterations, TimeBudget, GradTolerance, Stalled };

std::string to_string(TerminationReason reason);

/// One row per iterate. gamma and bt_count describe the step taken from
/// this iterate; both are 0 on the final row.
struct IterationRecord {
  std::size_t n = 0;
  double mu = 0.0;
  double gamma = 0.0;
  double grad_norm = 0.0;
  double surrogate_value = 0.0;
  double true_value = 0.0;
  double elapsed_s = 0.0;
  int bt_count = 0;
};

struct SolverTrace {
  std::vector<IterationRecord> records;
  std::optional<SkewParam> final_v;
  StiefelPoint final_u;
  TerminationReason reason = TerminationReason::MaxIterations;

  /// Steps taken; records.size() == iterations() + 1.
  std::size_t iterations() const {
    return records.empty() ? 0 : records.size() - 1;
  }
};

struct BacktrackResult {
  double gamma;
  int trial_count;
  double value;
};

/// Backtracking: gamma = gamma_initial * rho^k for the smallest
/// k >= 0 with phi(gamma) <= phi0 - c * gamma * slope, where slope is the
/// squared norm of the search direction. Throws LineSearchFailure after
/// config.max_trials reductions.
BacktrackResult armijo_backtrack(const std::function<double(double)> &phi,
                                 double phi0, double slope,
                                 double gamma_initial,
                                 const ArmijoConfig &config,
                                 std::size_t iteration = 0);

/// True when c * gamma_initial * slope is too small to be resolved next to
/// phi0 in double precision.
bool armijo_decrease_unresolvable(double phi0, double slope,
                                  double gamma_initial,
                                  const ArmijoConfig &config);

/// Backtracking on f_mu o F along -grad from V.
BacktrackResult backtrack(const CompositeProblem &problem, const SkewParam &v,
                          MoreauIndex mu, const SkewParam &grad,
                          const ArmijoConfig &config,
                          std::size_t iteration = 0);

/// 2 (1 - c) / L(mu).
double lipschitz_step(const LipschitzModel &model, MoreauIndex mu, double c);

struct BacktrackingStep {};
struct LipschitzStep {
  LipschitzModel model;
};
using StepMode = std::variant<BacktrackingStep, LipschitzStep>;

struct VSmoothOptions {
  SmoothingSchedule schedule;
  ArmijoConfig armijo;
  StoppingRule stop;
  StepMode step_mode = BacktrackingStep{};
  /// Evaluate the unsmoothed objective every k iterations (and at the
  /// final iterate); other rows carry NaN.
  std::size_t true_value_every = 1;
  /// Called once per step with the record, the iterate the step starts
  /// from and the surrogate gradient there.
  std::function<void(const IterationRecord &, const SkewParam &,
                     const SkewParam &)>
      observer;
};

SolverTrace vsmooth_run(const CompositeProblem &problem, const SkewParam &v0,
                        const VSmoothOptions &options);

} // namespace svs
