#pragma once

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <string>

#include "acsplit/errors.hpp"

namespace acsplit {

/// Row-major dense storage for an n x n periodic grid. Row index i runs
/// along x, column index j along y.
using FieldArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform periodic square grid [0, length)^2 with n cells per side.
class GridSpec {
 public:
  explicit GridSpec(int n, double length = 1.0);

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double h() const noexcept { return length_ / n_; }
  /// Cell-centre coordinate of index i.
  double coord(int i) const noexcept { return (i + 0.5) * h(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int n_;
  double length_;
};

/// Real values at cell centres of a GridSpec.
class ScalarField {
 public:
  explicit ScalarField(const GridSpec& grid);
  ScalarField(const GridSpec& grid, FieldArray values);

  static ScalarField constant(const GridSpec& grid, double value);

  const GridSpec& grid() const noexcept { return grid_; }
  const FieldArray& values() const noexcept { return values_; }
  FieldArray& values() noexcept { return values_; }

  double operator()(int i, int j) const { return values_(i, j); }
  double& operator()(int i, int j) { return values_(i, j); }

  bool all_finite() const { return values_.allFinite(); }
  double max_abs() const { return values_.abs().maxCoeff(); }
  double mean() const { return values_.mean(); }

 private:
  GridSpec grid_;
  FieldArray values_;
};

/// Samples f at the cell centres: values(i, j) = f((i+1/2)h, (j+1/2)h).
/// Throws DomainError if f produces a non-finite value.
template <class F>
ScalarField make_field(const GridSpec& grid, F&& f) {
  ScalarField out(grid);
  for (int i = 0; i < grid.n(); ++i) {
    const double x = grid.coord(i);
    for (int j = 0; j < grid.n(); ++j) {
      const double v = f(x, grid.coord(j));
      if (!std::isfinite(v)) {
        throw DomainError("make_field: non-finite value at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
      out(i, j) = v;
    }
  }
  return out;
}

/// 2 chi_B - 1 for the disc B of the given radius around (cx, cy).
ScalarField circle_indicator(const GridSpec& grid, double radius, double cx = 0.5, double cy = 0.5);

/// sign(v) with the tie broken as sign(0) = +1.
inline double sign_pos(double v) noexcept { return v >= 0.0 ? 1.0 : -1.0; }

ScalarField sign_field(const ScalarField& u);

void check_same_grid(const ScalarField& a, const ScalarField& b, const char* where);

// Binary format: 16-byte header "ACSF", u32 n, u64 reserved (zero), then n*n
// little-endian f64, row-major.
void write_binary(const ScalarField& u, const std::filesystem::path& path);
ScalarField read_binary(const std::filesystem::path& path, double length = 1.0);
void write_csv(const ScalarField& u, const std::filesystem::path& path);

}  // namespace acsplit
