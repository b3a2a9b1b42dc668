#include "acsplit/thresholding.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "acsplit/diagnostics.hpp"
#include "acsplit/spectral.hpp"

namespace acsplit {

namespace {

constexpr double kCutoff = 50.0;  // tail below e^-50

double radial_integral(double (*f)(double)) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kCutoff, 15, 1e-13, &err);
  if (!(err <= 1e-8)) throw SolverError("kernel quadrature did not converge", err, 0);
  return v;
}

}  // namespace

MboState MboState::from(const ScalarField& u0) { return {u0, sign_field(u0)}; }

MboState mbo_step(const MboState& state, double eps) {
  if (!(eps > 0.0)) throw DomainError("mbo_step: eps must be > 0");
  const HelmholtzOperator op(state.u.grid(), 1.0, 0.5 * eps * eps);
  ScalarField next = op.solve(state.u_tilde);
  ScalarField thr = sign_field(next);
  return {std::move(next), std::move(thr)};
}

double eo_energy(const ScalarField& u, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("eo_energy: tau must be finite and > 0");
  if (u.max_abs() > 1.0 + 1e-6) throw DomainError("eo_energy: |u| must be <= 1");
  const HelmholtzOperator op(u.grid(), 1.0, tau);
  const ScalarField plus(u.grid(), 1.0 + u.values());
  const ScalarField minus(u.grid(), 1.0 - u.values());
  return l2_inner(minus, op.solve(plus)) / (2.0 * tau);
}

MboRun mbo_run(const ScalarField& u0, double eps, int steps) {
  if (steps < 0) throw DomainError("mbo_run: steps must be >= 0");
  const double tau = 0.5 * eps * eps;
  MboRun out{{}, {}, MboState::from(u0)};
  out.eo_energies.push_back(eo_energy(out.final_state.u_tilde, tau));
  out.radii.push_back(interface_radius(out.final_state.u_tilde));
  for (int k = 0; k < steps; ++k) {
    out.final_state = mbo_step(out.final_state, eps);
    out.eo_energies.push_back(eo_energy(out.final_state.u_tilde, tau));
    out.radii.push_back(interface_radius(out.final_state.u));
  }
  return out;
}

KernelMoments kernel_moments() {
  // Spherical shells 4 pi r^2 K(r) = r e^{-r}; a plane disc 2 pi rho K(rho) = e^{-rho}/2.
  const double m0 = radial_integral([](double r) { return r * std::exp(-r); });
  const double m2 = radial_integral([](double r) { return r * r * r * std::exp(-r); });
  const double pl = radial_integral([](double r) { return 0.5 * std::exp(-r) * (1.0 + r * r); });
  return {m0, m2, pl};
}

double kernel_velocity(const Eigen::Matrix3d& S, const Eigen::Vector3d& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12) throw DomainError("kernel_velocity: n must be a unit vector");
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + S.cwiseAbs().maxCoeff())) {
    throw DomainError("kernel_velocity: S must be symmetric");
  }
  // Orthonormal frame of the plane perpendicular to n.
  Eigen::Vector3d a = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = (a - a.dot(n) * n).normalized();
  const Eigen::Vector3d e2 = n.cross(e1);

  // int_0^inf rho^2 K(rho) rho d rho = (1/4pi) int rho^2 e^{-rho}.
  const double radial =
      radial_integral([](double r) { return r * r * std::exp(-r); }) / (4.0 * std::numbers::pi);
  // Trapezoid in angle is exact for the degree-2 trigonometric integrand.
  constexpr int kAngles = 16;
  double angular = 0.0;
  for (int k = 0; k < kAngles; ++k) {
    const double th = 2.0 * std::numbers::pi * k / kAngles;
    const Eigen::Vector3d xi = std::cos(th) * e1 + std::sin(th) * e2;
    angular += xi.dot(S * xi);
  }
  angular *= 2.0 * std::numbers::pi / kAngles;
  return -radial * angular;
}

}  // namespace acsplit
