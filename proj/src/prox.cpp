#include "svs/prox.hpp"

#include <cmath>
#include <sstream>

#include "svs/errors.hpp"

namespace svs {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

double soft_threshold(double z, double tau) {
  const double a = std::abs(z) - tau;
  return a > 0.0 ? sign(z) * a : 0.0;
}

double mcp_threshold(double z, double tau, double theta) {
  const double a = std::abs(z);
  if (a <= tau) return 0.0;
  if (a >= theta) return z;
  return sign(z) * std::min(theta, (a - tau) / (1.0 - tau / theta));
}

void require_positive_index(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << "prox index must be positive and finite, got " << t;
    throw InvalidArgument(os.str());
  }
}

void require_mcp_index(double t, double lambda, double theta) {
  require_positive_index(t);
  if (!(theta > 0.0)) throw InvalidArgument("MCP theta must be positive");
  if (lambda < 0.0) throw InvalidArgument("MCP lambda must be nonnegative");
  if (t * lambda / theta >= 1.0) {
    std::ostringstream os;
    os << "MCP prox requires t*lambda/theta < 1, got " << t * lambda / theta;
    throw InvalidArgument(os.str());
  }
}

} // namespace

WeaklyConvexFunction::WeaklyConvexFunction(PenaltyKind kind, double lambda,
                                           double theta)
    : kind_(kind), lambda_(lambda), theta_(theta),
      eta_(kind == PenaltyKind::MCP ? lambda / theta : 0.0) {}

WeaklyConvexFunction WeaklyConvexFunction::l1(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("l1 weight must be nonnegative and finite");
  return {PenaltyKind::L1, lambda, 1.0};
}

WeaklyConvexFunction WeaklyConvexFunction::mcp(double lambda, double theta) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("MCP weight must be nonnegative and finite");
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw InvalidArgument("MCP theta must be positive and finite");
  return {PenaltyKind::MCP, lambda, theta};
}

double WeaklyConvexFunction::lipschitz_norm(Eigen::Index entries) const {
  return lambda_ * std::sqrt(static_cast<double>(entries));
}

double WeaklyConvexFunction::scalar_value(double x) const {
  const double a = std::abs(x);
  if (kind_ == PenaltyKind::L1) return lambda_ * a;
  if (a <= theta_) return lambda_ * (a - x * x / (2.0 * theta_));
  return lambda_ * theta_ / 2.0;
}

double WeaklyConvexFunction::scalar_prox(double z, double t) const {
  if (kind_ == PenaltyKind::L1) {
    require_positive_index(t);
    return soft_threshold(z, t * lambda_);
  }
  require_mcp_index(t, lambda_, theta_);
  return mcp_threshold(z, t * lambda_, theta_);
}

double WeaklyConvexFunction::value(const Matrix &z) const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) s += scalar_value(z.data()[k]);
  return s;
}

Matrix WeaklyConvexFunction::prox(const Matrix &z, double t) const {
  if (kind_ == PenaltyKind::L1) return prox_l1(z, t, lambda_);
  return prox_mcp(z, t, lambda_, theta_);
}

Matrix WeaklyConvexFunction::subgradient(const Matrix &z) const {
  if (kind_ == PenaltyKind::L1)
    return z.unaryExpr([this](double x) { return lambda_ * sign(x); });
  return z.unaryExpr([this](double x) {
    const double a = std::abs(x);
    return a < theta_ ? lambda_ * sign(x) * (1.0 - a / theta_) : 0.0;
  });
}

void WeaklyConvexFunction::check_index(double mu) const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    std::ostringstream os;
    os << "Moreau index must be positive and finite, got " << mu;
    throw InvalidArgument(os.str());
  }
  if (eta_ > 0.0 && mu * eta_ >= 1.0) {
    std::ostringstream os;
    os << "Moreau index " << mu << " violates mu < 1/eta = " << 1.0 / eta_;
    throw InvalidArgument(os.str());
  }
}

Matrix prox_l1(const Matrix &z, double t, double lambda) {
  require_positive_index(t);
  const double tau = t * lambda;
  return z.unaryExpr([tau](double x) { return soft_threshold(x, tau); });
}

Matrix prox_mcp(const Matrix &z, double t, double lambda, double theta) {
  require_mcp_index(t, lambda, theta);
  const double tau = t * lambda;
  return z.unaryExpr(
      [tau, theta](double x) { return mcp_threshold(x, tau, theta); });
}

namespace {

// Calls visit(z_k, prox_k) for every entry; shared by the value and gradient
// paths so that neither allocates a prox matrix.
template <class Visit>
void for_each_prox(const WeaklyConvexFunction &g, const Matrix &z, double t,
                   Visit &&visit) {
  const double tau = t * g.lambda();
  const double *zd = z.data();
  const Eigen::Index n = z.size();
  if (g.kind() == PenaltyKind::L1) {
    for (Eigen::Index k = 0; k < n; ++k) visit(k, soft_threshold(zd[k], tau));
  } else {
    const double theta = g.theta();
    for (Eigen::Index k = 0; k < n; ++k)
      visit(k, mcp_threshold(zd[k], tau, theta));
  }
}

} // namespace

MoreauEval moreau_eval(const WeaklyConvexFunction &g, const Matrix &z,
                       MoreauIndex mu) {
  g.check_index(mu.mu);
  MoreauEval out;
  out.grad.resize(z.rows(), z.cols());
  double *gd = out.grad.data();
  const double *zd = z.data();
  const double inv = 1.0 / mu.mu;
  double penalty = 0.0, dist2 = 0.0;
  for_each_prox(g, z, mu.mu, [&](Eigen::Index k, double p) {
    const double r = zd[k] - p;
    gd[k] = r * inv;
    dist2 += r * r;
    penalty += g.scalar_value(p);
  });
  out.value = penalty + dist2 * (0.5 * inv);
  return out;
}

double moreau_value(const WeaklyConvexFunction &g, const Matrix &z,
                    MoreauIndex mu) {
  g.check_index(mu.mu);
  const double *zd = z.data();
  double penalty = 0.0, dist2 = 0.0;
  for_each_prox(g, z, mu.mu, [&](Eigen::Index k, double p) {
    const double r = zd[k] - p;
    dist2 += r * r;
    penalty += g.scalar_value(p);
  });
  return penalty + dist2 / (2.0 * mu.mu);
}

Matrix moreau_grad(const WeaklyConvexFunction &g, const Matrix &z,
                   MoreauIndex mu) {
  return moreau_eval(g, z, mu).grad;
}

} // namespace svs
