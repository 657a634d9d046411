#include "svs/cayley.hpp"

#include <cmath>
#include <sstream>

#include "svs/errors.hpp"

namespace svs {

namespace {

Matrix skew_part(const Matrix &m) { return 0.5 * (m - m.transpose()); }

void require_param_shape(const CayleyChart &chart, const SkewParam &v,
                         const char *who) {
  const auto n = chart.n(), p = chart.p();
  if (v.A.rows() != p || v.A.cols() != p || v.B.rows() != n - p ||
      v.B.cols() != p) {
    std::ostringstream os;
    os << who << ": parameter blocks A " << v.A.rows() << "x" << v.A.cols()
       << ", B " << v.B.rows() << "x" << v.B.cols() << " do not match chart ("
       << n << ", " << p << ")";
    throw InvalidArgument(os.str());
  }
}

void require_point_shape(const CayleyChart &chart, const Matrix &u,
                         const char *who) {
  if (u.rows() != chart.n() || u.cols() != chart.p()) {
    std::ostringstream os;
    os << who << ": expected " << chart.n() << "x" << chart.p()
       << " matrix, got " << u.rows() << "x" << u.cols();
    throw InvalidArgument(os.str());
  }
}

// Block solves with I + V for V in Q_{N,p}. Eliminating the lower block
// reduces everything to the p x p matrix K = I + A + B^T B, whose symmetric
// part is at least the identity.
class ShiftedSkewSolver {
public:
  explicit ShiftedSkewSolver(const SkewParam &v)
      : ShiftedSkewSolver(v.B, Matrix::Identity(v.p(), v.p()) + v.A +
                                   v.B.transpose() * v.B) {}

  // Z = (I + V)^{-1} Y.
  Matrix solve(const Matrix &y) const {
    const auto p = b_.cols();
    Matrix z(y.rows(), y.cols());
    z.topRows(p) =
        lu_.solve(y.topRows(p) + b_.transpose() * y.bottomRows(y.rows() - p));
    z.bottomRows(y.rows() - p) =
        y.bottomRows(y.rows() - p) - b_ * z.topRows(p);
    return z;
  }

  // Z = (I - V)^{-1} Y = (I + V)^{-T} Y.
  Matrix solve_transposed(const Matrix &y) const {
    const auto p = b_.cols();
    Matrix z(y.rows(), y.cols());
    z.topRows(p) = lu_t_.solve(
        y.topRows(p) - b_.transpose() * y.bottomRows(y.rows() - p));
    z.bottomRows(y.rows() - p) =
        y.bottomRows(y.rows() - p) + b_ * z.topRows(p);
    return z;
  }

  // Top block X1 = K^{-1} of (I + V)^{-1} I_{N x p}; the bottom block is
  // -B X1.
  Matrix top_inverse() const {
    return lu_.solve(Matrix::Identity(b_.cols(), b_.cols()));
  }

  const Matrix &b() const { return b_; }

private:
  ShiftedSkewSolver(const Matrix &b, const Matrix &k)
      : b_(b), lu_(k), lu_t_(k.transpose()) {}

  Matrix b_;
  Eigen::PartialPivLU<Matrix> lu_;
  Eigen::PartialPivLU<Matrix> lu_t_;
};

} // namespace

SkewParam SkewParam::zeros(Eigen::Index n, Eigen::Index p) {
  return {Matrix::Zero(p, p), Matrix::Zero(n - p, p)};
}

SkewParam SkewParam::project(const Matrix &full, Eigen::Index p) {
  const auto n = full.rows();
  if (full.cols() != n || p > n || p < 1)
    throw InvalidArgument("SkewParam::project: expected square N x N input");
  SkewParam out;
  out.A = skew_part(full.topLeftCorner(p, p));
  out.B = 0.5 * (full.bottomLeftCorner(n - p, p) -
                 full.topRightCorner(p, n - p).transpose());
  return out;
}

Matrix SkewParam::dense() const {
  const auto n = this->n(), p = this->p();
  Matrix v = Matrix::Zero(n, n);
  v.topLeftCorner(p, p) = A;
  v.bottomLeftCorner(n - p, p) = B;
  v.topRightCorner(p, n - p) = -B.transpose();
  return v;
}

bool SkewParam::all_finite() const { return A.allFinite() && B.allFinite(); }

SkewParam &SkewParam::operator+=(const SkewParam &o) {
  A += o.A;
  B += o.B;
  return *this;
}

SkewParam &SkewParam::operator-=(const SkewParam &o) {
  A -= o.A;
  B -= o.B;
  return *this;
}

SkewParam &SkewParam::operator*=(double s) {
  A *= s;
  B *= s;
  return *this;
}

SkewParam operator+(SkewParam a, const SkewParam &b) { return a += b; }
SkewParam operator-(SkewParam a, const SkewParam &b) { return a -= b; }
SkewParam operator*(double s, SkewParam a) { return a *= s; }

double dot(const SkewParam &a, const SkewParam &b) {
  return frobenius_dot(a.A, b.A) + 2.0 * frobenius_dot(a.B, b.B);
}

double norm(const SkewParam &a) { return std::sqrt(dot(a, a)); }

CayleyChart::CayleyChart(Matrix s, Eigen::Index p) : s_(std::move(s)), p_(p) {
  if (s_.rows() != s_.cols())
    throw InvalidArgument("CayleyChart: anchor must be square");
  if (p_ < 1 || p_ > s_.rows())
    throw InvalidArgument("CayleyChart: need 1 <= p <= N");
  const double residual =
      (s_.transpose() * s_ - Matrix::Identity(s_.rows(), s_.rows())).norm();
  if (!(residual <= 1e-10)) {
    std::ostringstream os;
    os << "CayleyChart: anchor is not orthogonal, ||S^T S - I||_F = "
       << residual;
    throw InvalidArgument(os.str());
  }
}

CayleyChart CayleyChart::identity(Eigen::Index n, Eigen::Index p) {
  return {Matrix::Identity(n, n), p};
}

StiefelPoint cayley_inverse(const CayleyChart &chart, const SkewParam &v) {
  require_param_shape(chart, v, "cayley_inverse");
  const auto n = chart.n(), p = chart.p();
  const ShiftedSkewSolver solver(v);
  const Matrix x1 = solver.top_inverse();
  // (I - V)(I + V)^{-1} I_{N x p} = [2 X1 - I; -2 B X1]
  Matrix w(n, p);
  w.topRows(p) = 2.0 * x1 - Matrix::Identity(p, p);
  w.bottomRows(n - p) = -2.0 * v.B * x1;
  return chart.S() * w;
}

SkewParam cayley_forward(const CayleyChart &chart, const StiefelPoint &u) {
  require_point_shape(chart, u, "cayley_forward");
  const auto n = chart.n(), p = chart.p();
  const Matrix m = chart.S().transpose() * u;
  const Matrix shifted = Matrix::Identity(p, p) + m.topRows(p);
  const double margin =
      Eigen::JacobiSVD<Matrix>(shifted).singularValues().minCoeff();
  if (!(margin > kSingularityTolerance)) {
    std::ostringstream os;
    os << "cayley_forward: U is in the singular-point set, smallest singular "
          "value of I + I^T S^T U is "
       << margin;
    throw SingularPointError(os.str(), margin);
  }
  const Matrix inv = Eigen::PartialPivLU<Matrix>(shifted).inverse();
  SkewParam v;
  // B = -M_lo (I + M_up)^{-1}; A = skew(2 (I + M_up)^{-1}).
  v.B = -m.bottomRows(n - p) * inv;
  v.A = skew_part(2.0 * inv);
  return v;
}

Matrix cayley_differential(const CayleyChart &chart, const SkewParam &v,
                           const SkewParam &d) {
  require_param_shape(chart, v, "cayley_differential");
  require_param_shape(chart, d, "cayley_differential");
  const auto n = chart.n(), p = chart.p();
  const ShiftedSkewSolver solver(v);
  const Matrix x1 = solver.top_inverse();
  // Y = D (I + V)^{-1} I_{N x p} with (I + V)^{-1} I_{N x p} = [X1; -B X1].
  Matrix y(n, p);
  y.topRows(p) = d.A * x1 + d.B.transpose() * (v.B * x1);
  y.bottomRows(n - p) = d.B * x1;
  return -2.0 * (chart.S() * solver.solve(y));
}

SkewParam cayley_adjoint_differential(const CayleyChart &chart,
                                      const SkewParam &v, const Matrix &m) {
  require_param_shape(chart, v, "cayley_adjoint_differential");
  require_point_shape(chart, m, "cayley_adjoint_differential");
  const auto n = chart.n(), p = chart.p();
  const ShiftedSkewSolver solver(v);
  const Matrix x1 = solver.top_inverse();
  // G = -2 (I - V)^{-1} S^T M X^T with X = [X1; -B X1]; project onto Q.
  const Matrix r = solver.solve_transposed(chart.S().transpose() * m);
  const auto r1 = r.topRows(p);
  const auto r2 = r.bottomRows(n - p);
  SkewParam out;
  out.A = skew_part(-2.0 * r1 * x1.transpose());
  out.B = -r2 * x1.transpose() - v.B * (x1 * r1.transpose());
  return out;
}

std::pair<CayleyChart, SkewParam> chart_from_anchor(const StiefelPoint &u0) {
  const auto n = u0.rows(), p = u0.cols();
  if (p < 1 || p > n)
    throw InvalidArgument("chart_from_anchor: need 1 <= p <= N");
  const double ortho =
      (u0.transpose() * u0 - Matrix::Identity(p, p)).norm();
  if (!(ortho <= 1e-10)) {
    std::ostringstream os;
    os << "chart_from_anchor: U0 is not orthonormal, ||U0^T U0 - I||_F = "
       << ortho;
    throw InvalidArgument(os.str());
  }
  const Eigen::JacobiSVD<Matrix> svd(u0.topRows(p),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    throw ConstructionError("chart_from_anchor: SVD of the top block failed");
  Matrix s = Matrix::Identity(n, n);
  s.topLeftCorner(p, p) = svd.matrixU() * svd.matrixV().transpose();
  CayleyChart chart(std::move(s), p);
  SkewParam v0 = cayley_forward(chart, u0);
  const double residual = (cayley_inverse(chart, v0) - u0).norm();
  if (!(residual <= 1e-10)) {
    std::ostringstream os;
    os << "chart_from_anchor: round-trip residual " << residual
       << " exceeds 1e-10";
    throw ConstructionError(os.str());
  }
  return {std::move(chart), std::move(v0)};
}

double singularity_margin(const CayleyChart &chart, const StiefelPoint &u) {
  require_point_shape(chart, u, "singularity_margin");
  const auto p = chart.p();
  const Matrix shifted = Matrix::Identity(p, p) +
                         chart.S().leftCols(p).transpose() * u;
  return Eigen::JacobiSVD<Matrix>(shifted).singularValues().minCoeff();
}

} // namespace svs
