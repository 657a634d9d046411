#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svs {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// U lies (numerically) in the singular-point set of the chart.
struct SingularPointError : std::runtime_error {
  SingularPointError(const std::string &what, double margin)
      : std::runtime_error(what), margin(margin) {}
  double margin;
};

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LineSearchFailure : std::runtime_error {
  LineSearchFailure(const std::string &what, std::size_t iteration)
      : std::runtime_error(what), iteration(iteration) {}
  std::size_t iteration;
};

struct NumericalFailure : std::runtime_error {
  NumericalFailure(const std::string &what, std::size_t iteration)
      : std::runtime_error(what), iteration(iteration) {}
  std::size_t iteration;
};

struct UnsupportedProblem : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GraphConstructionError : std::runtime_error {
  GraphConstructionError(const std::string &what, std::size_t vertex)
      : std::runtime_error(what), vertex(vertex) {}
  std::size_t vertex;
};

struct DegenerateEmbeddingError : std::runtime_error {
  DegenerateEmbeddingError(const std::string &what, std::size_t row)
      : std::runtime_error(what), row(row) {}
  std::size_t row;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string &what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line(line) {}
  std::size_t line;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace svs
