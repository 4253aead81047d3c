#pragma once

// Property checks over every module. `sigmak selftest` runs them all; the
// unit tests run them one by one.

#include <cstdint>
#include <string>
#include <vector>

namespace sigmak {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 0x5eed5eedULL;
  int samples = 10000;
};

std::vector<std::string> selftest_names();

/// Runs one named check. Unknown names come back failed.
CheckResult run_check(const std::string& name, const SelftestOptions& options = {});

std::vector<CheckResult> run_selftest(const SelftestOptions& options = {});

}  // namespace sigmak
