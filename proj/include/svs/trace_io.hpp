#pragma once

#include <iosfwd>
#include <string>

#include "svs/vsmooth.hpp"

namespace svs {

/// Column order of trace CSV files.
inline constexpr const char *kTraceHeader =
    "n,mu,gamma,grad_norm,surrogate_value,true_value,elapsed_s,bt_count";

void write_trace_csv(const SolverTrace &trace, std::ostream &out);
void write_trace_csv(const SolverTrace &trace, const std::string &path);

/// Parses the records of a trace CSV; final point and reason are not stored.
SolverTrace read_trace_csv(std::istream &in);

} // namespace svs
