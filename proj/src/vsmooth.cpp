#include "svs/vsmooth.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "svs/errors.hpp"

namespace svs {

SmoothingSchedule SmoothingSchedule::standard(double eta, double alpha) {
  SmoothingSchedule s{eta, alpha, 1.0 / (2.0 * eta)};
  s.validate();
  return s;
}

void SmoothingSchedule::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw InvalidArgument("SmoothingSchedule: eta must be positive");
  if (!(alpha >= 1.0) || !std::isfinite(alpha))
    throw InvalidArgument("SmoothingSchedule: alpha must be >= 1");
  if (!(scale > 0.0) || scale > 1.0 / (2.0 * eta) * (1.0 + 1e-15))
    throw InvalidArgument(
        "SmoothingSchedule: scale must lie in (0, 1/(2 eta)]");
}

double SmoothingSchedule::ratio_bound() const {
  return std::pow(2.0, 1.0 / alpha);
}

double mu_at(const SmoothingSchedule &schedule, std::size_t n) {
  if (n == 0) throw InvalidArgument("mu_at: n must be >= 1");
  return schedule.scale *
         std::pow(static_cast<double>(n), -1.0 / schedule.alpha);
}

double schedule_eta(const WeaklyConvexFunction &g) {
  if (g.kind() == PenaltyKind::L1) return 1.0;
  return std::max(g.lambda(), 1.0) / g.theta();
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
  case TerminationReason::MaxIterations:
    return "max_iterations";
  case TerminationReason::TimeBudget:
    return "time_budget";
  case TerminationReason::GradTolerance:
    return "grad_tolerance";
  case TerminationReason::Stalled:
    return "stalled";
  }
  return "unknown";
}

void ArmijoConfig::validate() const {
  if (!(c > 0.0 && c < 1.0))
    throw InvalidArgument("ArmijoConfig: c must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0))
    throw InvalidArgument("ArmijoConfig: rho must lie in (0, 1)");
  if (gamma_initial && !(*gamma_initial > 0.0))
    throw InvalidArgument("ArmijoConfig: gamma_initial must be positive");
  if (max_trials < 1)
    throw InvalidArgument("ArmijoConfig: max_trials must be positive");
}

BacktrackResult armijo_backtrack(const std::function<double(double)> &phi,
                                 double phi0, double slope,
                                 double gamma_initial,
                                 const ArmijoConfig &config,
                                 std::size_t iteration) {
  if (!(slope > 0.0))
    throw InvalidArgument(
        "backtrack: search direction must be nonzero (got squared norm " +
        std::to_string(slope) + ")");
  if (!(gamma_initial > 0.0))
    throw InvalidArgument("backtrack: gamma_initial must be positive");
  double gamma = gamma_initial;
  for (int k = 0; k <= config.max_trials; ++k) {
    const double trial = phi(gamma);
    if (trial <= phi0 - config.c * gamma * slope) return {gamma, k, trial};
    gamma *= config.rho;
  }
  std::ostringstream os;
  os << "backtracking found no Armijo step after " << config.max_trials
     << " reductions (iteration " << iteration << ", squared slope " << slope
     << ")";
  throw LineSearchFailure(os.str(), iteration);
}

bool armijo_decrease_unresolvable(double phi0, double slope,
                                  double gamma_initial,
                                  const ArmijoConfig &config) {
  const double resolution =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(phi0));
  return config.c * gamma_initial * slope < resolution;
}

BacktrackResult backtrack(const CompositeProblem &problem, const SkewParam &v,
                          MoreauIndex mu, const SkewParam &grad,
                          const ArmijoConfig &config, std::size_t iteration) {
  config.validate();
  const double gnorm2 = dot(grad, grad);
  const double gamma0 = config.gamma_initial.value_or(
      std::min(1.0, 1.0 / std::sqrt(gnorm2)));
  const double f0 = surrogate_value(problem, v, mu);
  return armijo_backtrack(
      [&](double gamma) {
        return surrogate_value(problem, v - gamma * grad, mu);
      },
      f0, gnorm2, gamma0, config, iteration);
}

double lipschitz_step(const LipschitzModel &model, MoreauIndex mu, double c) {
  if (!(c > 0.0 && c < 1.0))
    throw InvalidArgument("lipschitz_step: c must lie in (0, 1)");
  if (!(mu.mu > 0.0))
    throw InvalidArgument("lipschitz_step: mu must be positive");
  model.validate();
  return 2.0 * (1.0 - c) / model.at(mu.mu);
}

namespace {

void require_finite(const SurrogateEval &e, std::size_t n) {
  if (!std::isfinite(e.value) || !e.grad.all_finite()) {
    std::ostringstream os;
    os << "non-finite surrogate value or gradient at iteration " << n
       << " (value " << e.value << ")";
    throw NumericalFailure(os.str(), n);
  }
}

} // namespace

SolverTrace vsmooth_run(const CompositeProblem &problem, const SkewParam &v0,
                        const VSmoothOptions &options) {
  options.schedule.validate();
  options.armijo.validate();
  if (problem.g().eta() > 0.0 &&
      options.schedule.eta < problem.g().eta() * (1.0 - 1e-12))
    throw InvalidArgument("vsmooth_run: schedule eta is below the "
                          "weak-convexity modulus of g");
  if (const auto *lip = std::get_if<LipschitzStep>(&options.step_mode))
    lip->model.validate();
  const std::size_t every = std::max<std::size_t>(1, options.true_value_every);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  SolverTrace trace;
  SkewParam v = v0;
  std::size_t n = 1;
  double mu = mu_at(options.schedule, n);
  SurrogateEval eval = surrogate_eval(problem, v, MoreauIndex{mu});
  require_finite(eval, n);

  double gamma_initial = 1.0;
  if (options.armijo.gamma_initial) {
    gamma_initial = *options.armijo.gamma_initial;
  } else {
    const double g1 = norm(eval.grad);
    gamma_initial = g1 > 0.0 ? std::min(1.0, 1.0 / g1) : 1.0;
  }

  const auto &stop = options.stop;
  while (true) {
    IterationRecord rec;
    rec.n = n;
    rec.mu = mu;
    rec.grad_norm = norm(eval.grad);
    rec.surrogate_value = eval.value;

    std::optional<TerminationReason> reason;
    if (stop.grad_tolerance && rec.grad_norm <= *stop.grad_tolerance)
      reason = TerminationReason::GradTolerance;
    else if (n - 1 >= stop.max_iterations)
      reason = TerminationReason::MaxIterations;
    else if (stop.time_budget_seconds && elapsed() >= *stop.time_budget_seconds)
      reason = TerminationReason::TimeBudget;

    rec.true_value = (reason || (n - 1) % every == 0)
                         ? ambient_true_value(problem, eval.u)
                         : std::numeric_limits<double>::quiet_NaN();

    if (reason) {
      rec.elapsed_s = elapsed();
      trace.records.push_back(rec);
      trace.reason = *reason;
      break;
    }

    if (rec.grad_norm == 0.0) {
      // Exact stationary point of f_n o F; nothing to step along.
      rec.gamma = 0.0;
    } else if (const auto *lip =
                   std::get_if<LipschitzStep>(&options.step_mode)) {
      rec.gamma = lipschitz_step(lip->model, MoreauIndex{mu}, options.armijo.c);
    } else {
      const double gnorm2 = rec.grad_norm * rec.grad_norm;
      try {
        const BacktrackResult bt = armijo_backtrack(
            [&](double gamma) {
              return surrogate_value(problem, v - gamma * eval.grad,
                                     MoreauIndex{mu});
            },
            eval.value, gnorm2, gamma_initial, options.armijo, n);
        rec.gamma = bt.gamma;
        rec.bt_count = bt.trial_count;
      } catch (const LineSearchFailure &) {
        if (!armijo_decrease_unresolvable(eval.value, gnorm2, gamma_initial,
                                          options.armijo))
          throw;
        rec.bt_count = options.armijo.max_trials;
        rec.elapsed_s = elapsed();
        trace.records.push_back(rec);
        trace.reason = TerminationReason::Stalled;
        break;
      }
    }
    rec.elapsed_s = elapsed();
    trace.records.push_back(rec);
    if (options.observer) options.observer(rec, v, eval.grad);

    v -= rec.gamma * eval.grad;
    ++n;
    mu = mu_at(options.schedule, n);
    eval = surrogate_eval(problem, v, MoreauIndex{mu});
    require_finite(eval, n);
  }

  trace.final_u = std::move(eval.u);
  trace.final_v = std::move(v);
  return trace;
}

} // namespace svs
