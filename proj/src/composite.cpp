#include "svs/composite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "svs/errors.hpp"
#include "svs/random.hpp"

namespace svs {

SmoothMapping SmoothMapping::identity() {
  SmoothMapping m;
  m.value = [](const Matrix &u) { return u; };
  m.adjoint_differential = [](const Matrix &, const Matrix &cot) {
    return cot;
  };
  m.identity_flag = true;
  return m;
}

SmoothMapping SmoothMapping::gram() {
  SmoothMapping m;
  m.value = [](const Matrix &u) -> Matrix { return u * u.transpose(); };
  m.adjoint_differential = [](const Matrix &u, const Matrix &cot) -> Matrix {
    return (cot + cot.transpose()) * u;
  };
  return m;
}

CompositeProblem::CompositeProblem(SmoothFunction h, SmoothMapping s_map,
                                   WeaklyConvexFunction g, CayleyChart chart)
    : h_(std::move(h)), s_map_(std::move(s_map)), g_(g),
      chart_(std::move(chart)) {
  if (!h_.value || !h_.gradient)
    throw InvalidArgument("CompositeProblem: h needs value and gradient");
  if (!s_map_.value || !s_map_.adjoint_differential)
    throw InvalidArgument(
        "CompositeProblem: mapping needs value and adjoint differential");
  // Probe the mapping once at the anchor point for dimensional consistency.
  const Matrix u = chart_.S().leftCols(chart_.p());
  const Matrix hg = h_.gradient(u);
  if (hg.rows() != u.rows() || hg.cols() != u.cols())
    throw InvalidArgument("CompositeProblem: grad h has the wrong shape");
  const Matrix su = s_map_.value(u);
  target_size_ = su.size();
  const Matrix back = s_map_.adjoint_differential(u, su);
  if (back.rows() != u.rows() || back.cols() != u.cols())
    throw InvalidArgument(
        "CompositeProblem: adjoint differential has the wrong shape");
}

void LipschitzModel::validate() const {
  if (!(varpi1 >= 0.0) || !std::isfinite(varpi1) || !(varpi2 > 0.0) ||
      !std::isfinite(varpi2))
    throw InvalidArgument(
        "LipschitzModel: need finite varpi1 >= 0 and varpi2 > 0");
}

double ambient_true_value(const CompositeProblem &problem,
                          const StiefelPoint &u) {
  return problem.h().value(u) + problem.g().value(problem.s_map().value(u));
}

double ambient_smoothed_value(const CompositeProblem &problem,
                              const StiefelPoint &u, MoreauIndex mu) {
  return problem.h().value(u) +
         moreau_value(problem.g(), problem.s_map().value(u), mu);
}

Matrix ambient_smoothed_grad(const CompositeProblem &problem,
                             const StiefelPoint &u, MoreauIndex mu) {
  const Matrix su = problem.s_map().value(u);
  return problem.h().gradient(u) +
         problem.s_map().adjoint_differential(
             u, moreau_grad(problem.g(), su, mu));
}

SurrogateEval surrogate_eval(const CompositeProblem &problem,
                             const SkewParam &v, MoreauIndex mu) {
  SurrogateEval out;
  out.u = cayley_inverse(problem.chart(), v);
  const Matrix su = problem.s_map().value(out.u);
  const MoreauEval env = moreau_eval(problem.g(), su, mu);
  out.value = problem.h().value(out.u) + env.value;
  const Matrix ambient =
      problem.h().gradient(out.u) +
      problem.s_map().adjoint_differential(out.u, env.grad);
  out.grad = cayley_adjoint_differential(problem.chart(), v, ambient);
  return out;
}

double surrogate_value(const CompositeProblem &problem, const SkewParam &v,
                       MoreauIndex mu) {
  return ambient_smoothed_value(problem, cayley_inverse(problem.chart(), v),
                                mu);
}

SkewParam surrogate_grad(const CompositeProblem &problem, const SkewParam &v,
                         MoreauIndex mu) {
  const Matrix u = cayley_inverse(problem.chart(), v);
  return cayley_adjoint_differential(problem.chart(), v,
                                     ambient_smoothed_grad(problem, u, mu));
}

double true_value(const CompositeProblem &problem, const SkewParam &v) {
  return ambient_true_value(problem, cayley_inverse(problem.chart(), v));
}

LipschitzModel estimate_lipschitz_model(const CompositeProblem &problem,
                                        const std::vector<StiefelPoint> &points,
                                        int samples_per_point,
                                        unsigned long long seed,
                                        double varpi1) {
  if (points.empty() || samples_per_point < 1)
    throw InvalidArgument("estimate_lipschitz_model: need samples");
  Rng rng(seed);
  double kappa_s = 0.0;
  for (const auto &u : points) {
    const Matrix su = problem.s_map().value(u);
    for (int k = 0; k < samples_per_point; ++k) {
      Matrix cot = rng.normal_matrix(su.rows(), su.cols());
      cot /= cot.norm();
      kappa_s = std::max(kappa_s,
                         problem.s_map().adjoint_differential(u, cot).norm());
    }
  }
  constexpr double kappa_f = 2.0;
  LipschitzModel model{varpi1, kappa_f * kappa_f * kappa_s * kappa_s};
  model.validate();
  return model;
}

} // namespace svs
