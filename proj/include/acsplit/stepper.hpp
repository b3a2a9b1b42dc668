#pragma once

#include <functional>
#include <optional>

#include "acsplit/diagnostics.hpp"
#include "acsplit/grid.hpp"
#include "acsplit/potentials.hpp"
#include "acsplit/spectral.hpp"

namespace acsplit {

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  int cg_max_iter = 1000;
};

/// Operator-splitting QP settings for the barrier step.
struct AdmmOptions {
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  int max_iter = 20000;
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
  bool adaptive_rho = true;
  int rho_interval = 25;
};

struct StepperConfig {
  GridSpec grid;
  PotentialSpec potential;
  double eps;
  TimeStep tau;
  NewtonOptions newton{};
  AdmmOptions admm{};

  /// Throws DomainError on a bad combination (eps <= 0, non-positive
  /// tolerances, infinite tau with the standard potential, ...).
  void validate() const;
};

struct StepReport {
  int inner_iterations = 0;
  double residual = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double l2_move = 0.0;
  double lp_move = 0.0;
  double h1_move = 0.0;
};

struct StepResult {
  ScalarField u;
  StepReport report;
};

/// One convex-concave splitting step
///   (1 - tau Lap) u+ + (tau/eps^2) W_vex'(u+) = u - (tau/eps^2) W_conc'(u),
/// dispatched on the potential kind. Holds the spectral operators that do not
/// change between steps.
class Stepper {
 public:
  explicit Stepper(StepperConfig cfg);

  const StepperConfig& config() const noexcept { return cfg_; }
  StepResult step(const ScalarField& u) const;

  StepResult step_quadratic(const ScalarField& u) const;
  StepResult step_quartic(const ScalarField& u) const;
  StepResult step_barrier(const ScalarField& u) const;

 private:
  StepReport finish(const ScalarField& u, const ScalarField& next, int iters, double residual) const;

  StepperConfig cfg_;
  SpectralSymbol k2_;
  std::optional<HelmholtzOperator> quadratic_op_;
};

StepResult step_quadratic(const ScalarField& u, const StepperConfig& cfg);
StepResult step_quartic(const ScalarField& u, const StepperConfig& cfg);
StepResult step_barrier(const ScalarField& u, const StepperConfig& cfg);

struct RunHooks {
  /// Called after every accepted step with the 1-based step index.
  std::function<void(int, const ScalarField&, const StepReport&)> on_step;
};

struct RunResult {
  EnergyTrace trace;
  ScalarField final_field;
};

/// Applies n_steps steps. A step error ends the run; the trace so far is
/// returned with `failed` set and the error message recorded.
RunResult run(const ScalarField& u0, const StepperConfig& cfg, int n_steps, const RunHooks& hooks = {});

}  // namespace acsplit
