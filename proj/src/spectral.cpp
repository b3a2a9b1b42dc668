#include "acsplit/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace acsplit {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per grid size with FFTW_ESTIMATE (deterministic) and
// FFTW_UNALIGNED so they can run on Eigen-owned buffers.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    FieldArray real(n, n);
    Spectrum cplx(n, n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_2d(n, n, real.data(), reinterpret_cast<fftw_complex*>(cplx.data()),
                                 flags);
    p.c2r = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
                                 flags);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

Spectrum forward_fft(const ScalarField& u) {
  const int n = u.grid().n();
  const PlanPair plans = PlanCache::instance().get(n);
  Spectrum out(n, n / 2 + 1);
  // r2c leaves its input intact, but the interface is non-const.
  FieldArray in = u.values();
  fftw_execute_dft_r2c(plans.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

ScalarField inverse_fft(const GridSpec& grid, const Spectrum& coeffs) {
  const int n = grid.n();
  const PlanPair plans = PlanCache::instance().get(n);
  Spectrum scratch = coeffs;  // c2r destroys its input
  FieldArray out(n, n);
  fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  out /= static_cast<double>(n) * n;
  return ScalarField(grid, std::move(out));
}

SpectralSymbol wavenumber_squared(const GridSpec& grid) {
  const int n = grid.n();
  const double base = 2.0 * std::numbers::pi / grid.length();
  SpectralSymbol k2(n, n / 2 + 1);
  for (int i = 0; i < n; ++i) {
    const double kx = base * signed_index(i, n);
    for (int j = 0; j <= n / 2; ++j) {
      const double ky = base * j;
      k2(i, j) = kx * kx + ky * ky;
    }
  }
  return k2;
}

SpectralSymbol hermitian_weights(const GridSpec& grid) {
  const int n = grid.n();
  SpectralSymbol w = SpectralSymbol::Constant(n, n / 2 + 1, 2.0);
  w.col(0).setOnes();
  w.col(n / 2).setOnes();
  return w;
}

ScalarField laplacian(const ScalarField& u) {
  Spectrum c = forward_fft(u);
  c *= (-wavenumber_squared(u.grid())).cast<std::complex<double>>();
  return inverse_fft(u.grid(), c);
}

HelmholtzOperator::HelmholtzOperator(const GridSpec& grid, double a, double b)
    : grid_(grid), a_(a), b_(b) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(a + b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("HelmholtzOperator: need finite a, b >= 0 with a + b > 0");
  }
  symbol_ = a_ + b_ * wavenumber_squared(grid_);
}

ScalarField HelmholtzOperator::solve(const ScalarField& rhs) const {
  if (!(rhs.grid() == grid_)) throw DomainError("HelmholtzOperator::solve: grid mismatch");
  Spectrum c = forward_fft(rhs);
  if (a_ == 0.0) {
    const double n2 = static_cast<double>(grid_.n()) * grid_.n();
    const double mean = c(0, 0).real() / n2;
    if (std::abs(mean) > 1e-12 * (1.0 + rhs.max_abs())) {
      throw SingularSystemError("HelmholtzOperator::solve: a = 0 and rhs has nonzero mean");
    }
    c(0, 0) = 0.0;
    SpectralSymbol s = symbol_;
    s(0, 0) = 1.0;
    c /= s.cast<std::complex<double>>();
  } else {
    c /= symbol_.cast<std::complex<double>>();
  }
  return inverse_fft(grid_, c);
}

ScalarField HelmholtzOperator::apply(const ScalarField& u) const {
  if (!(u.grid() == grid_)) throw DomainError("HelmholtzOperator::apply: grid mismatch");
  Spectrum c = forward_fft(u);
  c *= symbol_.cast<std::complex<double>>();
  return inverse_fft(grid_, c);
}

double lp_norm(const ScalarField& u, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  const double h2 = u.grid().h() * u.grid().h();
  if (p == 2.0) return std::sqrt(h2 * u.values().square().sum());
  return std::pow(h2 * u.values().abs().pow(p).sum(), 1.0 / p);
}

double l2_inner(const ScalarField& u, const ScalarField& v) {
  check_same_grid(u, v, "l2_inner");
  const double h2 = u.grid().h() * u.grid().h();
  return h2 * (u.values() * v.values()).sum();
}

double h1_seminorm(const ScalarField& u) {
  const GridSpec& g = u.grid();
  const Spectrum c = forward_fft(u);
  const double n2 = static_cast<double>(g.n()) * g.n();
  const double scale = g.h() * g.h() / n2;
  const double s = (hermitian_weights(g) * wavenumber_squared(g) * c.abs2()).sum();
  return std::sqrt(scale * s);
}

}  // namespace acsplit
