#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acsplit/grid.hpp"
#include "acsplit/potentials.hpp"

namespace acsplit {

/// Nominal step size; +infinity is a first-class value.
class TimeStep {
 public:
  explicit TimeStep(double tau);
  static TimeStep infinite();

  bool is_infinite() const noexcept { return infinite_; }
  /// tau, or +inf.
  double value() const noexcept;
  /// 1/tau, or exactly 0 for the infinite step.
  double inverse() const noexcept { return infinite_ ? 0.0 : 1.0 / tau_; }
  std::string str() const;

 private:
  TimeStep() = default;
  double tau_ = 0.0;
  bool infinite_ = false;
};

/// Modica-Mortola energy (eps/2)|u|_{H1}^2 + (h^2/eps) sum W(u_ij). Barrier
/// kinds clip to [-1, 1] first and throw DomainError beyond 1 + 1e-6.
double mm_energy(const ScalarField& u, double eps, const PotentialSpec& spec);

struct DissipationCheck {
  double lhs;
  double rhs;
  bool holds;
};

/// (eps/2)|d|_{H1}^2 + (eps/tau)|d|_{L2}^2 + (cbar/eps)|d|_{Lp}^p <= E(u0) - E(u1)
/// with d = u1 - u0, slack 1e-6. Uses the potential's primary pair.
DissipationCheck dissipation_check(const ScalarField& u0, const ScalarField& u1, double eps,
                                   TimeStep tau, const PotentialSpec& spec);
DissipationCheck dissipation_check(const ScalarField& u0, const ScalarField& u1, double eps,
                                   TimeStep tau, const PotentialSpec& spec, CurvaturePair pair);

/// Slow-motion bound on |u_N - u_0|_{Lp}. For p = 2 this is sqrt(2 N eps E0);
/// otherwise E0^(1/p) (N eps^(1/(p-1)))^(1 - 1/p).
double drift_bound(double e0, int n_steps, double eps, double p);

/// sqrt(area{u > 0} / pi); nullopt when the positive set is empty.
std::optional<double> interface_radius(const ScalarField& u);

struct StepRecord {
  int step = 0;
  double energy = 0.0;
  std::optional<double> radius;
  double l2_move = 0.0;
  double lp_move = 0.0;
  double h1_move = 0.0;
  int inner_iterations = 0;
};

struct EnergyTrace {
  std::vector<StepRecord> records;
  /// Resolved run parameters, echoed as `# key=value` lines.
  std::map<std::string, std::string> metadata;
  double initial_energy = 0.0;
  std::optional<double> initial_radius;
  bool failed = false;
  std::string failure;

  /// Energies within `rel_tol` relative of nonincreasing, initial energy included.
  bool energy_monotone(double rel_tol = 1e-8) const;
};

void write_trace_csv(const EnergyTrace& trace, const std::filesystem::path& path);
EnergyTrace read_trace_csv(const std::filesystem::path& path);

struct FitResult {
  double c_eff;
  double residual;
  int n_points;
};

/// Least-squares fit of r_k^2 = r0^2 - 2 c_eff eps^2 k over samples with
/// r_k >= min_radius (intercept free). Throws DomainError with < 10 samples.
FitResult fit_effective_step(std::span<const int> steps, std::span<const double> radii, double eps,
                             double min_radius);
/// Uses the trace's radius column and min_radius = 5h from its `n`/`length`
/// metadata.
FitResult fit_effective_step(const EnergyTrace& trace, double eps);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace acsplit
