#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "svs/cayley.hpp"
#include "svs/prox.hpp"

namespace svs {

/// Smooth part h of the objective on R^{N x p}.
struct SmoothFunction {
  std::function<double(const Matrix &)> value;
  std::function<Matrix(const Matrix &)> gradient;
  std::optional<double> grad_lipschitz;
};

/// Smooth inner mapping S of g o S. The adjoint differential takes a point U
/// and a cotangent M in the target space and returns an N x p matrix.
struct SmoothMapping {
  std::function<Matrix(const Matrix &)> value;
  std::function<Matrix(const Matrix &, const Matrix &)> adjoint_differential;
  bool identity_flag = false;

  static SmoothMapping identity();
  /// U -> U U^T with (D S(U))^*[M] = (M + M^T) U.
  static SmoothMapping gram();
};

/// f o F = (h + g o S) o Phi_S^{-1} on Q_{N,p}.
class CompositeProblem {
public:
  CompositeProblem(SmoothFunction h, SmoothMapping s_map,
                   WeaklyConvexFunction g, CayleyChart chart);

  const SmoothFunction &h() const { return h_; }
  const SmoothMapping &s_map() const { return s_map_; }
  const WeaklyConvexFunction &g() const { return g_; }
  const CayleyChart &chart() const { return chart_; }

  /// Number of entries of S(U), the dimension g acts on.
  Eigen::Index target_size() const { return target_size_; }
  /// lambda * sqrt(target_size()).
  double g_lipschitz() const { return g_.lipschitz_norm(target_size_); }

private:
  SmoothFunction h_;
  SmoothMapping s_map_;
  WeaklyConvexFunction g_;
  CayleyChart chart_;
  Eigen::Index target_size_;
};

/// A problem together with the chart coordinates of its initial point.
struct AnchoredProblem {
  CompositeProblem problem;
  SkewParam v0;
};

/// L(mu) = varpi1 + varpi2 / mu.
struct LipschitzModel {
  double varpi1 = 0.0;
  double varpi2 = 1.0;

  double at(double mu) const { return varpi1 + varpi2 / mu; }
  void validate() const;
};

double surrogate_value(const CompositeProblem &problem, const SkewParam &v,
                       MoreauIndex mu);
SkewParam surrogate_grad(const CompositeProblem &problem, const SkewParam &v,
                         MoreauIndex mu);
double true_value(const CompositeProblem &problem, const SkewParam &v);

/// Ambient objective h(U) + g(S(U)).
double ambient_true_value(const CompositeProblem &problem,
                          const StiefelPoint &u);
/// Ambient surrogate h(U) + g^mu(S(U)).
double ambient_smoothed_value(const CompositeProblem &problem,
                              const StiefelPoint &u, MoreauIndex mu);
/// grad h(U) + (D S(U))^*[grad g^mu(S(U))].
Matrix ambient_smoothed_grad(const CompositeProblem &problem,
                             const StiefelPoint &u, MoreauIndex mu);

struct SurrogateEval {
  StiefelPoint u;
  double value;
  SkewParam grad;
};

/// Value and parameter-space gradient of the surrogate from one pass.
SurrogateEval surrogate_eval(const CompositeProblem &problem,
                             const SkewParam &v, MoreauIndex mu);

/// Estimates varpi2 = kappa_F^2 kappa_S^2 with kappa_F = 2 and kappa_S
/// sampled as the largest observed ||(D S(U))^*[M]|| / ||M|| over random
/// unit cotangents at the given points; varpi1 = 0 unless supplied.
LipschitzModel estimate_lipschitz_model(const CompositeProblem &problem,
                                        const std::vector<StiefelPoint> &points,
                                        int samples_per_point,
                                        unsigned long long seed,
                                        double varpi1 = 0.0);

} // namespace svs
