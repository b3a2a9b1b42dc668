#include "acsplit/potentials.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace acsplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;

double sgn(double u) { return u >= 0.0 ? 1.0 : -1.0; }

bool is_bar(const PotentialSpec& s) {
  return s.kind() == PotentialKind::QuadraticWR && std::isinf(s.parameter());
}

double parse_number(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInf;
  std::size_t pos = 0;
  const double v = std::stod(text, &pos);
  if (pos != text.size()) throw DomainError("bad number '" + text + "'");
  return v;
}

std::string format_number(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

PotentialSpec PotentialSpec::quadratic_wr(double R) {
  if (!(R > 0.0)) throw DomainError("QuadraticWR: R must be > 0");
  return {PotentialKind::QuadraticWR, R};
}

PotentialSpec PotentialSpec::quadratic_bar() { return {PotentialKind::QuadraticWR, kInf}; }
PotentialSpec PotentialSpec::standard() { return {PotentialKind::Standard, 0.0}; }
PotentialSpec PotentialSpec::barrier_abs() { return {PotentialKind::BarrierAbs, 0.0}; }
PotentialSpec PotentialSpec::barrier_quadratic() { return {PotentialKind::BarrierQuadratic, 0.0}; }

PotentialSpec PotentialSpec::ell_one(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("EllOneAlpha: alpha must be >= 0");
  return {PotentialKind::EllOneAlpha, alpha};
}

PotentialSpec PotentialSpec::parse(const std::string& id) {
  auto param_after = [&](const std::string& prefix) -> std::optional<double> {
    if (id.rfind(prefix, 0) != 0) return std::nullopt;
    try {
      return parse_number(id.substr(prefix.size()));
    } catch (const std::logic_error&) {
      throw DomainError("bad potential id '" + id + "'");
    }
  };
  if (id == "standard") return standard();
  if (id == "barrier_abs") return barrier_abs();
  if (id == "barrier_quad") return barrier_quadratic();
  if (auto R = param_after("wr:R=")) return std::isinf(*R) ? quadratic_bar() : quadratic_wr(*R);
  if (auto a = param_after("elloneg:alpha=")) return ell_one(*a);
  throw DomainError("unknown potential id '" + id + "'");
}

std::string PotentialSpec::id() const {
  switch (kind_) {
    case PotentialKind::QuadraticWR: return "wr:R=" + format_number(param_);
    case PotentialKind::Standard: return "standard";
    case PotentialKind::BarrierAbs: return "barrier_abs";
    case PotentialKind::BarrierQuadratic: return "barrier_quad";
    case PotentialKind::EllOneAlpha: return "elloneg:alpha=" + format_number(param_);
  }
  return "?";
}

bool PotentialSpec::is_barrier() const noexcept {
  return kind_ == PotentialKind::BarrierAbs || kind_ == PotentialKind::BarrierQuadratic ||
         kind_ == PotentialKind::EllOneAlpha;
}

std::optional<CurvaturePair> PotentialSpec::curvature() const {
  const auto pairs = curvature_pairs();
  if (pairs.empty()) return std::nullopt;
  return pairs.front();
}

std::vector<CurvaturePair> PotentialSpec::curvature_pairs() const {
  switch (kind_) {
    case PotentialKind::QuadraticWR: return {{2.0, 1.0}};
    // Concave defect of 1 - 2u^2 is exactly 2(u - U)^2; u^4 gives (4, 1/3).
    case PotentialKind::Standard: return {{2.0, 2.0}, {4.0, 1.0 / 3.0}};
    case PotentialKind::BarrierQuadratic: return {{2.0, 1.0}};
    case PotentialKind::BarrierAbs:
    case PotentialKind::EllOneAlpha: return {};
  }
  return {};
}

WrCoefficients wr_coefficients(double R) {
  if (!(R > 0.0)) throw DomainError("wr_coefficients: R must be > 0");
  return {1.0 + 2.0 / R, 2.0 * std::sqrt(R + 1.0) / R};
}

double w_vex(const PotentialSpec& spec, double u) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR: return u * u;
    case PotentialKind::Standard: return u * u * u * u;
    case PotentialKind::BarrierAbs:
    case PotentialKind::BarrierQuadratic: return std::abs(u) <= 1.0 ? 0.0 : kInf;
    case PotentialKind::EllOneAlpha: return (spec.parameter() + 1.0) * std::max(std::abs(u) - 1.0, 0.0);
  }
  return 0.0;
}

double w_conc(const PotentialSpec& spec, double u) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR: {
      if (is_bar(spec)) return 1.0 - 2.0 * std::abs(u);
      const auto [beta, gamma] = wr_coefficients(spec.parameter());
      return beta - gamma * std::sqrt(spec.parameter() * u * u + 1.0);
    }
    case PotentialKind::Standard: return 1.0 - 2.0 * u * u;
    case PotentialKind::BarrierAbs:
    case PotentialKind::EllOneAlpha: return 1.0 - std::abs(u);
    case PotentialKind::BarrierQuadratic: return 1.0 - u * u;
  }
  return 0.0;
}

double w(const PotentialSpec& spec, double u) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR:
      if (is_bar(spec)) {
        const double d = std::abs(u) - 1.0;
        return d * d;
      }
      return w_vex(spec, u) + w_conc(spec, u);
    case PotentialKind::Standard: {
      const double d = u * u - 1.0;
      return d * d;
    }
    case PotentialKind::BarrierAbs: return std::abs(u) <= 1.0 ? 1.0 - std::abs(u) : kInf;
    case PotentialKind::BarrierQuadratic: return std::abs(u) <= 1.0 ? 1.0 - u * u : kInf;
    case PotentialKind::EllOneAlpha:
      return std::abs(u) <= 1.0 ? 1.0 - std::abs(u) : spec.parameter() * (std::abs(u) - 1.0);
  }
  return 0.0;
}

double w_vex_prime(const PotentialSpec& spec, double u) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR: return 2.0 * u;
    case PotentialKind::Standard: return 4.0 * u * u * u;
    case PotentialKind::EllOneAlpha:
      return std::abs(u) > 1.0 ? (spec.parameter() + 1.0) * sgn(u) : 0.0;
    case PotentialKind::BarrierAbs:
    case PotentialKind::BarrierQuadratic: break;
  }
  throw DomainError("w_vex_prime: convex part of " + spec.id() + " is a box constraint");
}

double w_conc_prime(const PotentialSpec& spec, double u) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR: {
      if (is_bar(spec)) return -2.0 * sgn(u);
      const double R = spec.parameter();
      const double gamma = wr_coefficients(R).gamma;
      return -gamma * R * u / std::sqrt(R * u * u + 1.0);
    }
    case PotentialKind::Standard: return -4.0 * u;
    case PotentialKind::BarrierAbs:
    case PotentialKind::EllOneAlpha: return -sgn(u);
    case PotentialKind::BarrierQuadratic: return -2.0 * u;
  }
  return 0.0;
}

double w_second(const PotentialSpec& spec, double u) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR: {
      if (is_bar(spec)) return 2.0;
      const double R = spec.parameter();
      const double gamma = wr_coefficients(R).gamma;
      return 2.0 - gamma * R * std::pow(R * u * u + 1.0, -1.5);
    }
    case PotentialKind::Standard: return 12.0 * u * u - 4.0;
    case PotentialKind::BarrierAbs: return 0.0;
    case PotentialKind::BarrierQuadratic: return -2.0;
    case PotentialKind::EllOneAlpha: return 0.0;
  }
  return 0.0;
}

double phi_bar(double x) { return sgn(x) * (1.0 - std::exp(-kSqrt2 * std::abs(x))); }

double phi_barrier_abs(double x) {
  if (std::abs(x) >= kSqrt2) return sgn(x);
  return kSqrt2 * x - sgn(x) * x * x / 2.0;
}

namespace {

// phi' = sqrt(2 W(phi)), phi(0) = 0, integrated to |x| with an adaptive
// Runge-Kutta-Fehlberg 7(8) pair. Only used for finite R.
double wr_profile(const PotentialSpec& spec, double x) {
  namespace ode = boost::numeric::odeint;
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  double phi = 0.0;
  auto rhs = [&spec](const double& p, double& dp, double) {
    dp = std::sqrt(2.0 * std::max(0.0, w(spec, std::min(p, 1.0))));
  };
  ode::integrate_adaptive(ode::make_controlled(1e-15, 1e-15, ode::runge_kutta_fehlberg78<double>()),
                          rhs, phi, 0.0, ax, 1e-3);
  return sgn(x) * std::min(phi, 1.0);
}

constexpr double kQuarterPeriod = std::numbers::pi / (2.0 * kSqrt2);

}  // namespace

double optimal_profile(const PotentialSpec& spec, double x) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR: return is_bar(spec) ? phi_bar(x) : wr_profile(spec, x);
    case PotentialKind::Standard: return std::tanh(kSqrt2 * x);
    case PotentialKind::BarrierAbs:
    case PotentialKind::EllOneAlpha: return phi_barrier_abs(x);
    case PotentialKind::BarrierQuadratic:
      return std::abs(x) >= kQuarterPeriod ? sgn(x) : std::sin(kSqrt2 * x);
  }
  return 0.0;
}

double optimal_profile_derivative(const PotentialSpec& spec, double x) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR:
      if (is_bar(spec)) return kSqrt2 * std::exp(-kSqrt2 * std::abs(x));
      return std::sqrt(2.0 * std::max(0.0, w(spec, optimal_profile(spec, x))));
    case PotentialKind::Standard: {
      const double t = std::tanh(kSqrt2 * x);
      return kSqrt2 * (1.0 - t * t);
    }
    case PotentialKind::BarrierAbs:
    case PotentialKind::EllOneAlpha: return std::max(0.0, kSqrt2 - std::abs(x));
    case PotentialKind::BarrierQuadratic:
      return std::abs(x) >= kQuarterPeriod ? 0.0 : kSqrt2 * std::cos(kSqrt2 * x);
  }
  return 0.0;
}

double normalization_constant(const PotentialSpec& spec) {
  auto speed = [&](double z) { return std::sqrt(2.0 * std::max(0.0, w(spec, z))); };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err_left = 0.0;
  double err_right = 0.0;
  // Split at 0: several potentials have a kink there.
  const double left = integrator.integrate(speed, -1.0, 0.0, 1e-12, &err_left);
  const double right = integrator.integrate(speed, 0.0, 1.0, 1e-12, &err_right);
  const double err = err_left + err_right;
  if (!(err <= 1e-8)) throw SolverError("normalization_constant: quadrature did not converge", err, 0);
  return left + right;
}

BetaMin beta_min(double p, double z_max, double tol) {
  if (!(p >= 2.0)) throw DomainError("beta_min: p must be >= 2");
  if (!(z_max > 1.0)) throw DomainError("beta_min: z_max must exceed 1");
  auto objective = [p](double z) { return (std::pow(z - 1.0, p) + p * z - 1.0) / std::pow(z, p); };

  // Coarse scan, then Brent on the bracketing cell.
  constexpr int kCells = 4000;
  const double dz = (z_max - 1.0) / kCells;
  int best = 0;
  double best_val = objective(1.0);
  for (int k = 1; k <= kCells; ++k) {
    const double v = objective(1.0 + k * dz);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double lo = 1.0 + std::max(0, best - 1) * dz;
  const double hi = 1.0 + std::min(kCells, best + 1) * dz;
  const int bits = std::clamp(static_cast<int>(-std::log2(tol)), 8, 52);
  auto [z, val] = boost::math::tools::brent_find_minima(objective, lo, hi, bits);
  if (best_val < val) {
    z = 1.0 + best * dz;
    val = best_val;
  }

  const double lower = std::pow(2.0, -p);
  const double upper = p * std::pow(2.0, 1.0 - p);
  if (val < lower - 1e-12 || val > upper + 1e-12) {
    throw std::logic_error("beta_min: result outside [2^-p, p 2^(1-p)]");
  }
  return {val, z};
}

bool check_power_law(double p, double beta, double u, double w) {
  const double au = std::abs(u);
  const double lhs = std::pow(std::abs(u + w), p);
  const double lead = std::pow(au, p) + (au == 0.0 ? 0.0 : p * std::pow(au, p - 2.0) * u * w);
  const double rhs = lead + (beta - 1e-9) * std::pow(std::abs(w), p);
  // Rounding in the three O(|u|^p) terms.
  const double fp_slack = 64.0 * std::numeric_limits<double>::epsilon() *
                          std::pow(au + std::abs(w), p);
  return lhs >= rhs - fp_slack;
}

bool check_power_law(double p, double u, double w) {
  return check_power_law(p, beta_min(p).value, u, w);
}

double one_d_first_step(double x, double eps, double tau) {
  if (!(eps > 0.0)) throw DomainError("one_d_first_step: eps must be > 0");
  if (!(tau > 0.0)) throw DomainError("one_d_first_step: tau must be > 0");
  const double stretch = std::isinf(tau) ? 1.0 : std::sqrt(1.0 + eps * eps / (2.0 * tau));
  return phi_bar(stretch * x / eps);
}

}  // namespace acsplit
