#pragma once

// Invariant and acceptance checks, shared by `rotpend selftest` and the
// acceptance test binary. Frozen expected values in here were computed
// independently of the library (hand arithmetic, closed forms, a separate
// eigenvalue computation).

#include <cstdint>
#include <string>
#include <vector>

namespace rotpend {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr std::uint64_t kDefaultSelftestSeed = 20240611;

std::vector<CheckResult> run_acceptance_suite(std::uint64_t seed = kDefaultSelftestSeed);

/// "PASS  3  exact linearization  (…detail…)".
std::string format_check(const CheckResult& r);

}  // namespace rotpend
