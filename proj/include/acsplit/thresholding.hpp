#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "acsplit/grid.hpp"

namespace acsplit {

/// Relaxed field u_n and its thresholded companion sign(u_n).
struct MboState {
  ScalarField u;
  ScalarField u_tilde;

  static MboState from(const ScalarField& u0);
};

/// u+ = (1 - (eps^2/2) Lap)^{-1} u_tilde, u_tilde+ = sign(u+).
MboState mbo_step(const MboState& state, double eps);

/// (1/2tau) h^2 sum (1 - u) G_tau(1 + u), G_tau = (1 - tau Lap)^{-1}.
/// DomainError when |u| exceeds 1 + 1e-6.
double eo_energy(const ScalarField& u, double tau);

struct MboRun {
  std::vector<double> eo_energies;  ///< energy of u_tilde_k, k = 0..steps
  std::vector<std::optional<double>> radii;
  MboState final_state;
};

MboRun mbo_run(const ScalarField& u0, double eps, int steps);

struct KernelMoments {
  double m0;
  double m2;
  double plane_integral;
};

/// Integrals of K(x) = exp(-|x|)/(4 pi |x|): over R^3, against |x|^2 over
/// R^3, and against (1 + |xi|^2) over a plane through 0.
KernelMoments kernel_moments();

/// -int over the plane perpendicular to n of xi^T S xi K(xi). DomainError if
/// |n| differs from 1 by more than 1e-12 or S is not symmetric.
double kernel_velocity(const Eigen::Matrix3d& S, const Eigen::Vector3d& n);

}  // namespace acsplit
