#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acsplit/errors.hpp"

namespace acsplit {

enum class PotentialKind {
  QuadraticWR,       ///< u^2 + beta - gamma sqrt(R u^2 + 1); R = +inf gives (|u| - 1)^2
  Standard,          ///< (u^2 - 1)^2 = u^4 + (1 - 2u^2)
  BarrierAbs,        ///< 1 - |u| on [-1, 1], +inf outside
  BarrierQuadratic,  ///< 1 - u^2 on [-1, 1], +inf outside
  EllOneAlpha,       ///< 1 - |u| inside, alpha (|u| - 1) outside
};

/// Exponent and constant of the joint curvature inequality
///   W(u) >= W(U) + (W_vex'(U) + W_conc'(u)) (u - U) + cbar |u - U|^p.
struct CurvaturePair {
  double p;
  double cbar;
};

class PotentialSpec {
 public:
  static PotentialSpec quadratic_wr(double R);
  /// The R -> infinity member (|u| - 1)^2 with concave part 1 - 2|u|.
  static PotentialSpec quadratic_bar();
  static PotentialSpec standard();
  static PotentialSpec barrier_abs();
  static PotentialSpec barrier_quadratic();
  static PotentialSpec ell_one(double alpha);

  /// Parses `wr:R=100`, `wr:R=inf`, `standard`, `barrier_abs`, `barrier_quad`,
  /// `elloneg:alpha=0.5`.
  static PotentialSpec parse(const std::string& id);
  std::string id() const;

  PotentialKind kind() const noexcept { return kind_; }
  /// R for QuadraticWR, alpha for EllOneAlpha, 0 otherwise.
  double parameter() const noexcept { return param_; }

  bool is_barrier() const noexcept;
  /// W_vex(u) = u^2 exactly (the linear-step family).
  bool has_quadratic_convex_part() const noexcept { return kind_ == PotentialKind::QuadraticWR; }

  /// Primary curvature pair used by the dissipation check, if any.
  std::optional<CurvaturePair> curvature() const;
  /// Every curvature pair known for this potential (Standard carries two).
  std::vector<CurvaturePair> curvature_pairs() const;

 private:
  PotentialSpec(PotentialKind kind, double param) : kind_(kind), param_(param) {}
  PotentialKind kind_;
  double param_;
};

struct WrCoefficients {
  double beta;
  double gamma;
};

/// beta = 1 + 2/R, gamma = 2 sqrt(R+1)/R. DomainError for R <= 0.
WrCoefficients wr_coefficients(double R);

/// W(u); barrier kinds return +inf for |u| > 1.
double w(const PotentialSpec& spec, double u);
double w_vex(const PotentialSpec& spec, double u);
double w_conc(const PotentialSpec& spec, double u);
/// Not defined for the pure barrier kinds (their convex part is the box).
double w_vex_prime(const PotentialSpec& spec, double u);
/// Uses sign(0) = +1 for the kinked kinds.
double w_conc_prime(const PotentialSpec& spec, double u);
/// Second derivative of W on the smooth part of its domain.
double w_second(const PotentialSpec& spec, double u);

/// phi_bar(x) = sign(x)(1 - exp(-sqrt2 |x|)), the profile of (|u|-1)^2.
double phi_bar(double x);
/// Finite-segment profile of 1 - |u|: sqrt2 x - sign(x) x^2/2 on |x| <= sqrt2.
double phi_barrier_abs(double x);

/// Heteroclinic profile phi' = sqrt(2 W(phi)), phi(0) = 0.
double optimal_profile(const PotentialSpec& spec, double x);
double optimal_profile_derivative(const PotentialSpec& spec, double x);

/// c_W = int_{-1}^{1} sqrt(2 W(z)) dz.
double normalization_constant(const PotentialSpec& spec);

struct BetaMin {
  double value;
  double argmin;
};

/// min over z in [1, z_max] of ((z-1)^p + p z - 1) / z^p.
BetaMin beta_min(double p, double z_max = 50.0, double tol = 1e-10);

/// |u+w|^p >= |u|^p + p|u|^(p-2) u w + (beta_min(p) - 1e-9)|w|^p.
bool check_power_law(double p, double u, double w);
bool check_power_law(double p, double beta, double u, double w);

/// Exact first step from sign(x) for the quadratic kind:
/// phi_bar(sqrt(1 + eps^2/(2 tau)) x / eps); tau = +inf allowed.
double one_d_first_step(double x, double eps, double tau);

}  // namespace acsplit
