#pragma once

#include <optional>

#include "svs/dataset.hpp"

namespace svs {

struct GraphMatrices {
  Matrix w;      // symmetric nonnegative affinity, zero diagonal
  Vector degree; // D = diag(degree)
  Matrix l;      // I - D^{-1/2} W D^{-1/2}
};

/// Symmetrized-union k-nearest-neighbour graph with Gaussian weights
/// exp(-||xi_i - xi_j||^2 / (2 sigma_i sigma_j)). Without a bandwidth,
/// sigma_i is the distance from xi_i to its ceil(k/2)-th neighbour; a
/// bandwidth sets sigma_i = bandwidth for every point.
GraphMatrices knn_affinity(const Dataset &data, int k,
                           std::optional<double> bandwidth = std::nullopt);

/// Eigenvectors of L for the K smallest eigenvalues, as an N x K Stiefel
/// point.
StiefelPoint sc_embed(const GraphMatrices &graph, int k);

} // namespace svs
