#include "acsplit/experiments.hpp"

#include <cmath>
#include <sstream>

namespace acsplit {

StepperConfig CircleRun::config() const {
  return StepperConfig{GridSpec(n), potential, eps, tau, newton, admm};
}

double reference_c_eff(const PotentialSpec& spec) {
  switch (spec.kind()) {
    case PotentialKind::QuadraticWR: return 0.29;
    case PotentialKind::Standard: return 0.25;
    default: return 0.5;
  }
}

int default_circle_steps(const PotentialSpec& spec, double eps, double r0) {
  const double t = 0.75 * r0 * r0;  // r^2 from r0^2 to r0^2/4
  return static_cast<int>(std::ceil(t / (2.0 * reference_c_eff(spec) * eps * eps)));
}

RunResult run_circle(const CircleRun& spec, const RunHooks& hooks) {
  const StepperConfig cfg = spec.config();
  const int steps = spec.steps > 0 ? spec.steps : default_circle_steps(spec.potential, spec.eps, spec.r0);
  RunResult out = run(circle_indicator(cfg.grid, spec.r0), cfg, steps, hooks);
  std::ostringstream r0;
  r0.precision(17);
  r0 << spec.r0;
  out.trace.metadata["r0"] = r0.str();
  out.trace.metadata["steps"] = std::to_string(steps);
  return out;
}

std::vector<SweepPoint> sweep_tau(const StepperConfig& base, const ScalarField& u0,
                                  const std::vector<TimeStep>& taus, double level, int cap,
                                  int threads) {
  if (cap < 1) throw DomainError("sweep_tau: cap must be >= 1");
  std::vector<SweepPoint> out(taus.size(), SweepPoint{TimeStep::infinite(), 0, false});
  parallel_for(static_cast<int>(taus.size()), threads, [&](int k) {
    StepperConfig cfg = base;
    cfg.tau = taus[k];
    const Stepper stepper(cfg);
    SweepPoint pt{taus[k], cap, false};
    ScalarField u = u0;
    if (mm_energy(u, cfg.eps, cfg.potential) <= level) {
      pt = {taus[k], 0, true};
    } else {
      for (int i = 1; i <= cap; ++i) {
        StepResult s = stepper.step(u);
        u = std::move(s.u);
        if (s.report.energy_after <= level) {
          pt = {taus[k], i, true};
          break;
        }
      }
    }
    out[k] = pt;
  });
  return out;
}

}  // namespace acsplit
