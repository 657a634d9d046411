#pragma once

#include <cstdint>
#include <vector>

#include "svs/types.hpp"

namespace svs {

/// Scales every row to unit Euclidean norm.
Matrix row_normalize(const Matrix &u);

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
  /// Inertia after each Lloyd iteration of the best restart.
  std::vector<double> inertia_history;
};

/// Lloyd's algorithm from k-means++ seeds; the restart with the lowest
/// inertia wins. An emptied cluster is re-seeded at the point farthest from
/// its assigned centroid.
KMeansResult kmeans(const Matrix &rows, int k, int restarts,
                    std::uint64_t seed, int max_iterations = 300);

/// I(A;B) / sqrt(H(A) H(B)). If exactly one labeling is constant the score
/// is 0; two constant labelings score 1.
double nmi(const std::vector<int> &a, const std::vector<int> &b);

/// Hubert-Arabie adjusted Rand index.
double ari(const std::vector<int> &a, const std::vector<int> &b);

} // namespace svs
