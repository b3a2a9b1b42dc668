#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "acsplit/grid.hpp"

namespace acsplit::testing {

/// Uniform values in [lo, hi].
inline ScalarField random_field(const GridSpec& grid, std::uint64_t seed, double lo = -1.0,
                                double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField u(grid);
  for (int i = 0; i < grid.n(); ++i) {
    for (int j = 0; j < grid.n(); ++j) u(i, j) = dist(rng);
  }
  return u;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
  return (a.values() - b.values()).abs().maxCoeff();
}

/// Composite Simpson rule with m (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int m = 20000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace acsplit::testing
