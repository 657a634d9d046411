#pragma once

#include <functional>
#include <vector>

#include "svs/cayley.hpp"
#include "svs/random.hpp"

// Reference computations that do not share code with the closed forms they
// check: brute-force minimization, finite differences, dense linear algebra.
namespace svs::oracle {

/// argmin_x t * r(x) + (x - z)^2 / 2 over [z - radius, z + radius]: best of
/// a uniform grid, then golden-section search on the two neighbouring cells.
double grid_prox(const std::function<double(double)> &r, double z, double t,
                 double radius, int nodes = 4001);

/// Minimum value of t * r(x) + (x - z)^2 / 2, found as in grid_prox.
double grid_envelope(const std::function<double(double)> &r, double z,
                     double t, double radius, int nodes = 4001);

/// Orthonormal basis of Q_{N,p} under the full N x N Frobenius product.
std::vector<SkewParam> skew_basis(Eigen::Index n, Eigen::Index p);

/// <g, E_k> for each basis element.
Vector coordinates(const SkewParam &g, const std::vector<SkewParam> &basis);

/// Central differences (f(V + h E_k) - f(V - h E_k)) / (2h).
Vector fd_coordinates(const std::function<double(const SkewParam &)> &f,
                      const SkewParam &v, const std::vector<SkewParam> &basis,
                      double h = 1e-6);

SkewParam random_skew(Eigen::Index n, Eigen::Index p, double scale, Rng &rng);

/// Haar-like orthogonal matrix from the QR factor of a Gaussian matrix.
Matrix random_orthogonal(Eigen::Index n, Rng &rng);

/// Dense S (I - V)(I + V)^{-1} I_{N x p} with an explicit inverse.
Matrix dense_cayley_inverse(const Matrix &s, const SkewParam &v);

/// Polar factor of Y from its thin SVD.
Matrix svd_polar(const Matrix &y);

} // namespace svs::oracle
