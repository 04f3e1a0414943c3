#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace regen {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The fast invariant suite: special functions, model functionals, samplers,
/// Brownian integrals, statistics and persistence. A few seconds in total.
std::vector<CheckResult> run_validation_suite(std::uint64_t seed = 20240601);

/// Prints `PASS name` / `FAIL name: detail` per check; returns true when all pass.
bool report_checks(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace regen
