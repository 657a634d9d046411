#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "svs/composite.hpp"

namespace svs {

/// Data for min_{U in St(p,N)} -Tr(U^T Xi^T Xi U) + lambda ||U||_1.
struct SpcaInstance {
  Matrix xi;   // num_samples x N
  Matrix gram; // Xi^T Xi
  double lambda = 0.1;
  Eigen::Index n = 0;
  Eigen::Index p = 0;

  static SpcaInstance from_data(Matrix xi, Eigen::Index p, double lambda);
};

/// Standard normal entries, columns centered, then scaled to ||Xi||_F = 1.
SpcaInstance generate_spca(Eigen::Index n, Eigen::Index p, double lambda,
                           Eigen::Index num_samples, std::uint64_t seed);

/// Composite problem with h(U) = -Tr(U^T G U), grad h = -2 G U, g = lambda
/// l1, S = Id, anchored at u0 through chart_from_anchor.
AnchoredProblem spca_problem(const SpcaInstance &instance,
                             const StiefelPoint &u0);

/// Fraction of entries with |U_ij| < tol.
double sparsity(const Matrix &u, double tol = 1e-4);
/// ||I_p - U^T U||_F.
double feasibility(const Matrix &u);

/// Row-major CSV of Xi (one sample per line, no header).
void write_instance_csv(const SpcaInstance &instance, std::ostream &out);
SpcaInstance read_instance_csv(std::istream &in, Eigen::Index p,
                               double lambda);

} // namespace svs
