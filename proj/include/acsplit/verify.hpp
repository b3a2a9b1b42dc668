#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace acsplit {

struct CheckResult {
  std::string id;
  int criterion = 0;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

struct VerifyOptions {
  int threads = 1;
  std::uint64_t seed = 20240611;
};

inline constexpr int kCriteria = 9;

/// Checks for one acceptance criterion (1..9). Each criterion also reports its
/// wall time against its budget as `cN_runtime`.
std::vector<CheckResult> verify_criterion(int criterion, const VerifyOptions& opts);

/// All requested criteria; 6 and 7 share their simulation runs.
std::vector<CheckResult> verify_all(const VerifyOptions& opts, const std::vector<int>& criteria);

/// `id STATUS measured expected tolerance`
std::string format_check(const CheckResult& c);

}  // namespace acsplit
