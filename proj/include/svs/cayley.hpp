#pragma once

#include <utility>

#include "svs/types.hpp"

namespace svs {

/// A point of Q_{N,p}, the N x N skew-symmetric matrices
///   [ A  -B^T ]
///   [ B   0   ]
/// with A skew p x p and B (N-p) x p. Inner product and norm are those of the
/// full N x N matrix under the Frobenius inner product.
struct SkewParam {
  Matrix A;
  Matrix B;

  static SkewParam zeros(Eigen::Index n, Eigen::Index p);
  /// Orthogonal projection P_Q of an arbitrary N x N matrix onto Q_{N,p}.
  static SkewParam project(const Matrix &full, Eigen::Index p);

  Eigen::Index n() const { return A.rows() + B.rows(); }
  Eigen::Index p() const { return A.rows(); }
  Matrix dense() const;
  bool all_finite() const;

  SkewParam &operator+=(const SkewParam &o);
  SkewParam &operator-=(const SkewParam &o);
  SkewParam &operator*=(double s);
};

SkewParam operator+(SkewParam a, const SkewParam &b);
SkewParam operator-(SkewParam a, const SkewParam &b);
SkewParam operator*(double s, SkewParam a);

double dot(const SkewParam &a, const SkewParam &b);
double norm(const SkewParam &a);

/// Orthogonal anchor S of the generalized inverse Cayley transform
///   Phi_S^{-1}(V) = S (I - V)(I + V)^{-1} I_{N x p}.
class CayleyChart {
public:
  CayleyChart(Matrix s, Eigen::Index p);
  static CayleyChart identity(Eigen::Index n, Eigen::Index p);

  const Matrix &S() const { return s_; }
  Eigen::Index n() const { return s_.rows(); }
  Eigen::Index p() const { return p_; }

private:
  Matrix s_;
  Eigen::Index p_;
};

/// Margin at or below which cayley_forward reports a singular point.
inline constexpr double kSingularityTolerance = 1e-8;

StiefelPoint cayley_inverse(const CayleyChart &chart, const SkewParam &v);

SkewParam cayley_forward(const CayleyChart &chart, const StiefelPoint &u);

/// D Phi_S^{-1}(V)[D] = -2 S (I+V)^{-1} D (I+V)^{-1} I_{N x p}.
Matrix cayley_differential(const CayleyChart &chart, const SkewParam &v,
                           const SkewParam &d);

/// Adjoint of cayley_differential with respect to the Frobenius inner
/// products on Q_{N,p} and R^{N x p}.
SkewParam cayley_adjoint_differential(const CayleyChart &chart,
                                      const SkewParam &v, const Matrix &m);

/// Builds S = diag(Q1 Q2^T, I) from an SVD of the top p x p block of U0 and
/// V0 = Phi_S(U0).
std::pair<CayleyChart, SkewParam> chart_from_anchor(const StiefelPoint &u0);

/// Smallest singular value of I_p + I_{N x p}^T S^T U.
double singularity_margin(const CayleyChart &chart, const StiefelPoint &u);

} // namespace svs
