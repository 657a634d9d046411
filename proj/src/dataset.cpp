#include "svs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "svs/errors.hpp"
#include "svs/random.hpp"

namespace svs {

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

} // namespace

void Dataset::validate() const {
  if (points.rows() < 1 || points.cols() < 1)
    throw InvalidArgument("Dataset: no points");
  if (!points.allFinite()) throw InvalidArgument("Dataset: non-finite point");
  if (labels) {
    if (static_cast<Eigen::Index>(labels->size()) != points.rows())
      throw InvalidArgument("Dataset: label count does not match point count");
    for (int l : *labels)
      if (l < 0 || l >= std::max(k, 1))
        throw InvalidArgument("Dataset: label outside [0, K)");
  }
}

Dataset read_dataset_csv(std::istream &in,
                         const std::optional<std::string> &label_column,
                         int k) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      header = split_csv_line(line);
  }
  if (header.empty()) throw ParseError("dataset CSV: missing header", line_no);

  std::optional<std::size_t> label_idx;
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), *label_column);
    if (it != header.end()) label_idx = it - header.begin();
  }

  std::vector<std::vector<double>> rows;
  std::vector<long long> raw_labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "dataset CSV: expected " << header.size() << " columns, got "
         << cells.size();
      throw ParseError(os.str(), line_no);
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::size_t used = 0;
      try {
        if (label_idx && c == *label_idx) {
          raw_labels.push_back(std::stoll(cells[c], &used));
        } else {
          row.push_back(std::stod(cells[c], &used));
        }
      } catch (const std::logic_error &) {
        used = std::string::npos;
      }
      if (used != cells[c].size())
        throw ParseError("dataset CSV: malformed value '" + cells[c] +
                             "' in column '" + header[c] + "'",
                         line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("dataset CSV: no data rows", line_no);

  Dataset data;
  data.points.resize(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      data.points(i, j) = rows[i][j];
  if (label_idx) {
    std::map<long long, int> remap;
    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (long long raw : raw_labels) {
      const auto [it, inserted] =
          remap.emplace(raw, static_cast<int>(remap.size()));
      labels.push_back(it->second);
    }
    data.labels = std::move(labels);
    data.k = k > 0 ? k : static_cast<int>(remap.size());
  } else {
    data.k = k;
  }
  data.validate();
  return data;
}

Dataset read_dataset_csv(const std::string &path,
                         const std::optional<std::string> &label_column,
                         int k) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file " + path);
  return read_dataset_csv(in, label_column, k);
}

Dataset make_blobs(int per_cluster, int k, int dim, double separation,
                   double sigma, std::uint64_t seed) {
  if (per_cluster < 1 || k < 1 || dim < 2 || !(sigma > 0.0))
    throw InvalidArgument("make_blobs: invalid parameters");
  Rng rng(seed);
  // Regular k-gon with side separation * sigma.
  const double side = separation * sigma;
  const double radius =
      k > 1 ? side / (2.0 * std::sin(std::numbers::pi / k)) : 0.0;
  Dataset data;
  data.k = k;
  data.points.resize(static_cast<Eigen::Index>(per_cluster) * k, dim);
  std::vector<int> labels;
  for (int c = 0; c < k; ++c) {
    Vector center = Vector::Zero(dim);
    const double angle = 2.0 * std::numbers::pi * c / k;
    center(0) = radius * std::cos(angle);
    center(1) = radius * std::sin(angle);
    for (int i = 0; i < per_cluster; ++i) {
      const Eigen::Index row = static_cast<Eigen::Index>(c) * per_cluster + i;
      for (int j = 0; j < dim; ++j)
        data.points(row, j) = center(j) + sigma * rng.normal();
      labels.push_back(c);
    }
  }
  data.labels = std::move(labels);
  return data;
}

Dataset subsample_rows(const Dataset &data, Eigen::Index count,
                       std::uint64_t seed) {
  if (count < 1 || count > data.size())
    throw InvalidArgument("subsample_rows: count out of range");
  Rng rng(seed);
  std::vector<Eigen::Index> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           rng.below(static_cast<std::uint64_t>(data.size() - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  Dataset out;
  out.k = data.k;
  out.points.resize(count, data.points.cols());
  std::vector<int> labels;
  for (Eigen::Index i = 0; i < count; ++i) {
    out.points.row(i) = data.points.row(idx[i]);
    if (data.labels) labels.push_back((*data.labels)[idx[i]]);
  }
  if (data.labels) out.labels = std::move(labels);
  return out;
}

} // namespace svs
