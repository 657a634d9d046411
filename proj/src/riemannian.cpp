#include "svs/riemannian.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "svs/errors.hpp"

namespace svs {

namespace {

void require_orthonormal(const StiefelPoint &u, const char *who) {
  const auto p = u.cols();
  const double residual = (u.transpose() * u - Matrix::Identity(p, p)).norm();
  if (!(residual <= 1e-8)) {
    std::ostringstream os;
    os << who << ": base point is not orthonormal, ||U^T U - I||_F = "
       << residual;
    throw InvalidArgument(os.str());
  }
}

void require_identity_mapping(const CompositeProblem &problem,
                              const char *who) {
  if (!problem.s_map().identity_flag)
    throw UnsupportedProblem(std::string(who) +
                             ": only S = Id problems are supported");
}

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::optional<TerminationReason> check_stop(const StoppingRule &stop,
                                            std::size_t n, double grad_norm,
                                            clock_type::time_point start) {
  if (stop.grad_tolerance && grad_norm <= *stop.grad_tolerance)
    return TerminationReason::GradTolerance;
  if (n - 1 >= stop.max_iterations) return TerminationReason::MaxIterations;
  if (stop.time_budget_seconds &&
      seconds_since(start) >= *stop.time_budget_seconds)
    return TerminationReason::TimeBudget;
  return std::nullopt;
}

void require_finite(const Matrix &d, double value, std::size_t n) {
  if (!std::isfinite(value) || !d.allFinite()) {
    std::ostringstream os;
    os << "non-finite objective or direction at iteration " << n;
    throw NumericalFailure(os.str(), n);
  }
}

} // namespace

TangentVector tangent_project(const StiefelPoint &u, const Matrix &x) {
  if (x.rows() != u.rows() || x.cols() != u.cols())
    throw InvalidArgument("tangent_project: shape mismatch");
  require_orthonormal(u, "tangent_project");
  const Matrix utx = u.transpose() * x;
  return {u, x - u * (0.5 * (utx + utx.transpose()))};
}

StiefelPoint polar_retract(const StiefelPoint &u, const TangentVector &d) {
  if (d.direction.rows() != u.rows() || d.direction.cols() != u.cols())
    throw InvalidArgument("polar_retract: shape mismatch");
  const Matrix y = u + d.direction;
  // For tangent D, (U + D)^T (U + D) = I + D^T D.
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(y.transpose() * y);
  const Vector inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return y * (eig.eigenvectors() * inv_sqrt.asDiagonal() *
              eig.eigenvectors().transpose());
}

SolverTrace rsub_run(const CompositeProblem &problem, const StiefelPoint &u0,
                     const RSubOptions &options) {
  require_identity_mapping(problem, "rsub_run");
  require_orthonormal(u0, "rsub_run");
  if (!(options.step_base > 0.0 && options.step_base < 1.0))
    throw InvalidArgument("rsub_run: step_base must lie in (0, 1)");

  const auto start = clock_type::now();
  SolverTrace trace;
  StiefelPoint u = u0;
  double gamma = 1.0;
  for (std::size_t n = 1;; ++n) {
    const double f = ambient_true_value(problem, u);
    const Matrix riem =
        tangent_project(u, problem.h().gradient(u) + problem.g().subgradient(u))
            .direction;
    require_finite(riem, f, n);

    IterationRecord rec;
    rec.n = n;
    rec.grad_norm = riem.norm();
    rec.surrogate_value = f;
    rec.true_value = f;
    const auto reason = check_stop(options.stop, n, rec.grad_norm, start);
    if (reason) {
      rec.elapsed_s = seconds_since(start);
      trace.records.push_back(rec);
      trace.reason = *reason;
      break;
    }
    gamma *= options.step_base;
    rec.gamma = gamma;
    rec.elapsed_s = seconds_since(start);
    trace.records.push_back(rec);
    u = polar_retract(u, TangentVector{u, -gamma * riem});
  }
  trace.final_u = std::move(u);
  return trace;
}

SolverTrace rsmooth_run(const CompositeProblem &problem,
                        const StiefelPoint &u0, const RSmoothOptions &options) {
  require_identity_mapping(problem, "rsmooth_run");
  require_orthonormal(u0, "rsmooth_run");
  options.schedule.validate();
  options.armijo.validate();

  const auto start = clock_type::now();
  SolverTrace trace;
  StiefelPoint u = u0;
  std::optional<double> gamma_initial = options.armijo.gamma_initial;
  for (std::size_t n = 1;; ++n) {
    const MoreauIndex mu{mu_at(options.schedule, n)};
    const double f = ambient_smoothed_value(problem, u, mu);
    const Matrix riem =
        tangent_project(u, ambient_smoothed_grad(problem, u, mu)).direction;
    require_finite(riem, f, n);

    IterationRecord rec;
    rec.n = n;
    rec.mu = mu.mu;
    rec.grad_norm = riem.norm();
    rec.surrogate_value = f;
    rec.true_value = ambient_true_value(problem, u);
    if (!gamma_initial)
      gamma_initial =
          rec.grad_norm > 0.0 ? std::min(1.0, 1.0 / rec.grad_norm) : 1.0;

    const auto reason = check_stop(options.stop, n, rec.grad_norm, start);
    if (reason) {
      rec.elapsed_s = seconds_since(start);
      trace.records.push_back(rec);
      trace.reason = *reason;
      break;
    }
    if (rec.grad_norm > 0.0) {
      const double gnorm2 = rec.grad_norm * rec.grad_norm;
      try {
        const BacktrackResult bt = armijo_backtrack(
            [&](double gamma) {
              return ambient_smoothed_value(
                  problem, polar_retract(u, TangentVector{u, -gamma * riem}),
                  mu);
            },
            f, gnorm2, *gamma_initial, options.armijo, n);
        rec.gamma = bt.gamma;
        rec.bt_count = bt.trial_count;
      } catch (const LineSearchFailure &) {
        if (!armijo_decrease_unresolvable(f, gnorm2, *gamma_initial,
                                          options.armijo))
          throw;
        rec.bt_count = options.armijo.max_trials;
        rec.elapsed_s = seconds_since(start);
        trace.records.push_back(rec);
        trace.reason = TerminationReason::Stalled;
        break;
      }
    }
    rec.elapsed_s = seconds_since(start);
    trace.records.push_back(rec);
    u = polar_retract(u, TangentVector{u, -rec.gamma * riem});
  }
  trace.final_u = std::move(u);
  return trace;
}

} // namespace svs
