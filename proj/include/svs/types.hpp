#pragma once

#include <Eigen/Dense>

namespace svs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A point on St(p,N): an N x p matrix with orthonormal columns.
using StiefelPoint = Matrix;

inline double frobenius_dot(const Matrix &a, const Matrix &b) {
  return (a.array() * b.array()).sum();
}

} // namespace svs
