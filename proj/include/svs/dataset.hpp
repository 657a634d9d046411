#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svs/types.hpp"

namespace svs {

/// Points as rows of an N x d matrix, optional class labels in [0, K).
struct Dataset {
  Matrix points;
  std::optional<std::vector<int>> labels;
  int k = 0;

  Eigen::Index size() const { return points.rows(); }
  void validate() const;
};

/// CSV with a header row of column names. The column named label_column
/// (if given and present) holds integer labels; every other column must be
/// numeric. Label values are remapped to 0..K-1 in order of first
/// appearance. k = 0 infers K from the labels.
Dataset read_dataset_csv(std::istream &in,
                         const std::optional<std::string> &label_column,
                         int k = 0);
Dataset read_dataset_csv(const std::string &path,
                         const std::optional<std::string> &label_column,
                         int k = 0);

/// K isotropic Gaussian blobs with standard deviation sigma whose centers
/// sit on a regular polygon with adjacent centers separation * sigma apart.
Dataset make_blobs(int per_cluster, int k, int dim, double separation,
                   double sigma, std::uint64_t seed);

/// Uniformly samples count rows without replacement, order preserved.
Dataset subsample_rows(const Dataset &data, Eigen::Index count,
                       std::uint64_t seed);

} // namespace svs
