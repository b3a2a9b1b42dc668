#pragma once

#include <complex>

#include "acsplit/grid.hpp"

namespace acsplit {

/// Half-plane Fourier coefficients of a real field: n x (n/2 + 1), unnormalized
/// forward transform.
using Spectrum = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-mode real weights on the half-plane layout.
using SpectralSymbol = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Spectrum forward_fft(const ScalarField& u);
ScalarField inverse_fft(const GridSpec& grid, const Spectrum& coeffs);

/// |k|^2 = (2 pi / length)^2 (kx^2 + ky^2) on the half-plane layout. The
/// Nyquist row uses |kx| = n/2.
SpectralSymbol wavenumber_squared(const GridSpec& grid);

/// Multiplicity of each half-plane column in the full spectrum (1 or 2).
SpectralSymbol hermitian_weights(const GridSpec& grid);

/// Exact spectral Laplacian, symbol -|k|^2.
ScalarField laplacian(const ScalarField& u);

/// (a - b Laplacian), diagonal in Fourier space. Immutable once built.
class HelmholtzOperator {
 public:
  HelmholtzOperator(const GridSpec& grid, double a, double b);

  const GridSpec& grid() const noexcept { return grid_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const SpectralSymbol& symbol() const noexcept { return symbol_; }

  /// u with (a - b Laplacian) u = rhs. With a = 0 the zero mode of rhs must
  /// vanish (SingularSystemError otherwise) and the returned u has mean 0.
  ScalarField solve(const ScalarField& rhs) const;
  ScalarField apply(const ScalarField& u) const;

 private:
  GridSpec grid_;
  double a_;
  double b_;
  SpectralSymbol symbol_;
};

/// (h^2 sum |u|^p)^(1/p); DomainError for p < 1.
double lp_norm(const ScalarField& u, double p);
double l2_inner(const ScalarField& u, const ScalarField& v);
/// (sum_k |k|^2 |u_k|^2)^(1/2) with the same normalization as the L2 norm.
double h1_seminorm(const ScalarField& u);

}  // namespace acsplit
