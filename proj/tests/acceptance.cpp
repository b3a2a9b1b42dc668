// Acceptance suite: every check, then one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "acsplit/verify.hpp"

int main(int argc, char** argv) {
  using namespace acsplit;
  std::vector<int> criteria;
  for (int k = 1; k < argc; ++k) criteria.push_back(std::atoi(argv[k]));
  if (criteria.empty()) {
    for (int k = 1; k <= kCriteria; ++k) criteria.push_back(k);
  }

  const auto checks = verify_all(VerifyOptions{}, criteria);
  std::map<int, bool> ok;
  for (int k : criteria) ok[k] = true;
  for (const auto& c : checks) {
    std::printf("%s\n", format_check(c).c_str());
    ok[c.criterion] = ok[c.criterion] && c.pass;
  }
  bool all = true;
  for (const auto& [k, pass] : ok) {
    std::printf("criterion %d %s\n", k, pass ? "PASS" : "FAIL");
    all = all && pass;
  }
  return all ? 0 : 1;
}
