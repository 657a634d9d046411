#pragma once

#include "svs/types.hpp"

namespace svs {

enum class PenaltyKind { L1, MCP };

/// Entrywise-separable weakly convex regularizer lambda * psi, where psi is
/// either the l1 norm or the minimax concave penalty
///   r_theta(x) = |x| - x^2 / (2 theta)   for |x| <= theta,
///              = theta / 2               otherwise.
/// Matrix arguments are treated as flat arrays of entries.
class WeaklyConvexFunction {
public:
  static WeaklyConvexFunction l1(double lambda);
  static WeaklyConvexFunction mcp(double lambda, double theta);

  PenaltyKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double theta() const { return theta_; }
  /// Tightest weak-convexity modulus of lambda * psi (0 for l1).
  double eta() const { return eta_; }
  /// Per-entry Lipschitz constant (lambda for both penalties).
  double lipschitz() const { return lambda_; }
  /// Frobenius-norm Lipschitz constant over m entries: lambda * sqrt(m).
  double lipschitz_norm(Eigen::Index entries) const;

  double scalar_value(double x) const;
  double scalar_prox(double z, double t) const;

  double value(const Matrix &z) const;
  /// prox_{t g}(z); throws InvalidArgument if t does not admit a unique
  /// minimizer.
  Matrix prox(const Matrix &z, double t) const;
  /// An element of the (limiting) subdifferential, 0 at kinks.
  Matrix subgradient(const Matrix &z) const;

  /// Throws InvalidArgument unless 0 < mu < 1/eta.
  void check_index(double mu) const;

private:
  WeaklyConvexFunction(PenaltyKind kind, double lambda, double theta);

  PenaltyKind kind_;
  double lambda_;
  double theta_;
  double eta_;
};

struct MoreauIndex {
  double mu;
};

/// sign(z) * max(|z| - t * lambda, 0), entrywise.
Matrix prox_l1(const Matrix &z, double t, double lambda = 1.0);

/// Entrywise minimizer of t * lambda * r_theta(x) + (x - z)^2 / 2.
/// Requires t * lambda / theta < 1.
Matrix prox_mcp(const Matrix &z, double t, double lambda, double theta);

double moreau_value(const WeaklyConvexFunction &g, const Matrix &z,
                    MoreauIndex mu);
Matrix moreau_grad(const WeaklyConvexFunction &g, const Matrix &z,
                   MoreauIndex mu);

struct MoreauEval {
  double value;
  Matrix grad;
};

// Value and gradient from a single prox evaluation.
MoreauEval moreau_eval(const WeaklyConvexFunction &g, const Matrix &z,
                       MoreauIndex mu);

} // namespace svs
