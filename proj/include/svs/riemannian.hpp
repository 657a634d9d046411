#pragma once

#include "svs/vsmooth.hpp"

namespace svs {

/// A direction in T_U St(p,N) = { D : U^T D + D^T U = 0 }.
struct TangentVector {
  StiefelPoint base;
  Matrix direction;
};

/// X - U sym(U^T X).
TangentVector tangent_project(const StiefelPoint &u, const Matrix &x);

/// Polar retraction (U + D)(I + D^T D)^{-1/2}, evaluated as the polar factor
/// of U + D.
StiefelPoint polar_retract(const StiefelPoint &u, const TangentVector &d);

struct RSubOptions {
  /// gamma_n = step_base^n.
  double step_base = 0.99;
  StoppingRule stop;
};

/// Riemannian subgradient method on h + g with S = Id. Trace rows report
/// mu = 0, grad_norm = ||D_n|| and surrogate_value = true_value.
SolverTrace rsub_run(const CompositeProblem &problem, const StiefelPoint &u0,
                     const RSubOptions &options);

struct RSmoothOptions {
  SmoothingSchedule schedule;
  ArmijoConfig armijo;
  StoppingRule stop;
};

/// Riemannian smoothing gradient method on h + g^{mu_n} with S = Id, Armijo
/// backtracking along the retracted curve.
SolverTrace rsmooth_run(const CompositeProblem &problem,
                        const StiefelPoint &u0, const RSmoothOptions &options);

} // namespace svs
