#include "svs/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "svs/errors.hpp"

namespace svs {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

void write_trace_csv(const SolverTrace &trace, std::ostream &out) {
  out << kTraceHeader << '\n';
  for (const auto &r : trace.records) {
    out << r.n << ',' << format_double(r.mu) << ',' << format_double(r.gamma)
        << ',' << format_double(r.grad_norm) << ','
        << format_double(r.surrogate_value) << ','
        << format_double(r.true_value) << ',' << format_double(r.elapsed_s)
        << ',' << r.bt_count << '\n';
  }
}

void write_trace_csv(const SolverTrace &trace, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trace file " + path);
  write_trace_csv(trace, out);
  if (!out) throw IoError("failed writing trace file " + path);
}

SolverTrace read_trace_csv(std::istream &in) {
  SolverTrace trace;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kTraceHeader)
    throw ParseError("trace CSV: unexpected header", line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) throw ParseError("trace CSV: expected 8 columns", line_no);
    try {
      IterationRecord r;
      r.n = std::stoull(cells[0]);
      r.mu = std::stod(cells[1]);
      r.gamma = std::stod(cells[2]);
      r.grad_norm = std::stod(cells[3]);
      r.surrogate_value = std::stod(cells[4]);
      r.true_value = std::stod(cells[5]);
      r.elapsed_s = std::stod(cells[6]);
      r.bt_count = std::stoi(cells[7]);
      trace.records.push_back(r);
    } catch (const std::logic_error &) {
      throw ParseError("trace CSV: malformed number", line_no);
    }
  }
  return trace;
}

} // namespace svs
