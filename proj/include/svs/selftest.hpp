#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "svs/types.hpp"

namespace svs {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
};

using ProxL1Fn = std::function<Matrix(const Matrix &, double t, double lambda)>;
using ProxMcpFn =
    std::function<Matrix(const Matrix &, double t, double lambda, double theta)>;

struct SelftestOptions {
  /// Prox implementations checked by the prox-oracle suite. Swapping in a
  /// broken formula must make that suite fail.
  ProxL1Fn prox_l1;
  ProxMcpFn prox_mcp;
  std::uint64_t seed = 0;
  /// Scalars per parameter cell in the prox suites.
  int samples = 200;
};

SelftestOptions default_selftest_options();

/// Runs all property suites; failures and exceptions become report content.
SelftestReport run_selftest(const SelftestOptions &options);
SelftestReport run_selftest();

/// One line per suite: status, name, seconds, detail.
std::string format_report(const SelftestReport &report);

} // namespace svs
