#include "acsplit/stepper.hpp"

#include <cmath>
#include <sstream>

namespace acsplit {

namespace {

using cplx = std::complex<double>;

FieldArray apply_symbol(const GridSpec& g, const FieldArray& v, const SpectralSymbol& s) {
  Spectrum c = forward_fft(ScalarField(g, v));
  c *= s.cast<cplx>();
  return inverse_fft(g, c).values();
}

FieldArray solve_symbol(const GridSpec& g, const FieldArray& rhs, const SpectralSymbol& s) {
  Spectrum c = forward_fft(ScalarField(g, rhs));
  c /= s.cast<cplx>();
  return inverse_fft(g, c).values();
}

double dot(const FieldArray& a, const FieldArray& b) { return (a * b).sum(); }

FieldArray conc_prime(const PotentialSpec& spec, const FieldArray& u) {
  return u.unaryExpr([&spec](double x) { return w_conc_prime(spec, x); });
}

}  // namespace

void StepperConfig::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("StepperConfig: eps must be > 0");
  if (!(newton.tol > 0.0) || newton.max_iter < 1 || newton.cg_max_iter < 1) {
    throw DomainError("StepperConfig: Newton tolerances must be positive");
  }
  if (!(admm.rho > 0.0) || !(admm.sigma > 0.0) || !(admm.alpha > 0.0 && admm.alpha < 2.0) ||
      admm.max_iter < 1 || !(admm.primal_tol > 0.0) || !(admm.dual_tol > 0.0) ||
      admm.rho_interval < 1) {
    throw DomainError("StepperConfig: invalid ADMM options");
  }
  if (potential.kind() == PotentialKind::Standard && tau.is_infinite()) {
    throw DomainError("StepperConfig: tau = inf is not supported for the standard potential");
  }
}

Stepper::Stepper(StepperConfig cfg) : cfg_(std::move(cfg)), k2_(wavenumber_squared(cfg_.grid)) {
  cfg_.validate();
  if (cfg_.potential.has_quadratic_convex_part()) {
    quadratic_op_.emplace(cfg_.grid, cfg_.tau.inverse() + 2.0 / (cfg_.eps * cfg_.eps), 1.0);
  }
}

StepResult Stepper::step(const ScalarField& u) const {
  switch (cfg_.potential.kind()) {
    case PotentialKind::QuadraticWR:
      return step_quadratic(u);
    case PotentialKind::Standard:
      return step_quartic(u);
    case PotentialKind::BarrierAbs:
    case PotentialKind::BarrierQuadratic:
    case PotentialKind::EllOneAlpha:
      return step_barrier(u);
  }
  throw std::logic_error("Stepper::step: unknown potential kind");
}

StepReport Stepper::finish(const ScalarField& u, const ScalarField& next, int iters,
                           double residual) const {
  StepReport r;
  r.inner_iterations = iters;
  r.residual = residual;
  r.energy_before = mm_energy(u, cfg_.eps, cfg_.potential);
  r.energy_after = mm_energy(next, cfg_.eps, cfg_.potential);
  const ScalarField d(u.grid(), next.values() - u.values());
  const auto pair = cfg_.potential.curvature();
  r.l2_move = lp_norm(d, 2.0);
  r.lp_move = lp_norm(d, pair ? pair->p : 2.0);
  r.h1_move = h1_seminorm(d);
  return r;
}

StepResult Stepper::step_quadratic(const ScalarField& u) const {
  if (!quadratic_op_) throw DomainError("step_quadratic: potential has no quadratic convex part");
  if (!(u.grid() == cfg_.grid)) throw DomainError("step_quadratic: grid mismatch");
  const double e2 = cfg_.eps * cfg_.eps;
  FieldArray rhs = -conc_prime(cfg_.potential, u.values()) / e2;
  if (!cfg_.tau.is_infinite()) rhs += cfg_.tau.inverse() * u.values();
  const ScalarField b(cfg_.grid, std::move(rhs));
  ScalarField next = quadratic_op_->solve(b);
  const double res = (quadratic_op_->apply(next).values() - b.values()).abs().maxCoeff();
  const double scale = 1.0 + b.max_abs();
  if (!(res <= 1e-10 * scale)) {
    throw SolverError("step_quadratic: linear residual too large", res / scale, 1);
  }
  StepReport rep = finish(u, next, 1, res / scale);
  return {std::move(next), rep};
}

// Newton on F(v) = (1 - tau Lap) v + c v^3 - rhs, c = 4 tau / eps^2, with PCG
// for the Jacobian and an Armijo backtrack on the convex potential of F.
StepResult Stepper::step_quartic(const ScalarField& u) const {
  if (cfg_.potential.kind() != PotentialKind::Standard) {
    throw DomainError("step_quartic: potential must be standard");
  }
  if (!(u.grid() == cfg_.grid)) throw DomainError("step_quartic: grid mismatch");
  const GridSpec& g = cfg_.grid;
  const double tau = cfg_.tau.value();
  const double c = 4.0 * tau / (cfg_.eps * cfg_.eps);
  const SpectralSymbol lin = 1.0 + tau * k2_;
  const FieldArray rhs = (1.0 + c) * u.values();
  const double scale = 1.0 + rhs.abs().maxCoeff();
  const double tol = cfg_.newton.tol * scale;

  auto lin_apply = [&](const FieldArray& v) { return apply_symbol(g, v, lin); };
  auto merit = [&](const FieldArray& v, const FieldArray& lv) {
    return 0.5 * dot(lv, v) + 0.25 * c * v.square().square().sum() - dot(rhs, v);
  };

  FieldArray v = u.values();
  FieldArray lv = lin_apply(v);
  FieldArray F = lv + c * v.cube() - rhs;
  double fnorm = F.abs().maxCoeff();
  int total_cg = 0;
  int it = 0;
  for (; it < cfg_.newton.max_iter && fnorm > tol; ++it) {
    const FieldArray diag = 3.0 * c * v.square();
    const SpectralSymbol pre = lin + diag.mean();
    // PCG for J delta = -F with a relative forcing term.
    const double eta = std::min(0.1, fnorm / scale);
    FieldArray delta = FieldArray::Zero(g.n(), g.n());
    FieldArray r = -F;
    FieldArray z = solve_symbol(g, r, pre);
    FieldArray p = z;
    double rz = dot(r, z);
    const double r0 = std::sqrt(dot(r, r));
    for (int k = 0; k < cfg_.newton.cg_max_iter; ++k) {
      const FieldArray jp = lin_apply(p) + diag * p;
      const double alpha = rz / dot(p, jp);
      delta += alpha * p;
      r -= alpha * jp;
      ++total_cg;
      if (std::sqrt(dot(r, r)) <= eta * r0) break;
      z = solve_symbol(g, r, pre);
      const double rz_new = dot(r, z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    const double phi0 = merit(v, lv);
    const double slope = dot(F, delta);
    double t = 1.0;
    for (int ls = 0; ls < 30; ++ls) {
      const FieldArray trial = v + t * delta;
      const FieldArray ltrial = lin_apply(trial);
      const FieldArray ftrial = ltrial + c * trial.cube() - rhs;
      const double fn = ftrial.abs().maxCoeff();
      const double phi = merit(trial, ltrial);
      if (phi <= phi0 + 1e-4 * t * slope || fn < fnorm) {
        v = trial;
        lv = ltrial;
        F = ftrial;
        fnorm = fn;
        break;
      }
      t *= 0.5;
      if (ls == 29) {
        throw SolverError("step_quartic: line search failed", fnorm / scale, it + 1);
      }
    }
  }
  if (!(fnorm <= tol)) {
    throw SolverError("step_quartic: Newton did not converge", fnorm / scale, it);
  }
  ScalarField next(g, std::move(v));
  StepReport rep = finish(u, next, total_cg, fnorm / scale);
  return {std::move(next), rep};
}

// OSQP-type ADMM with constraint matrix I on the eps^2-scaled problem
//   min 1/2 <P v, v> + <q, v> + g(v),  P = eps^2 (1/tau - Lap),
//   q = W_conc'(u) - eps^2 u / tau,
// where g is the box indicator (barrier kinds) or (alpha+1) max(|v|-1, 0).
StepResult Stepper::step_barrier(const ScalarField& u) const {
  const PotentialSpec& spec = cfg_.potential;
  if (!spec.is_barrier()) {
    throw DomainError("step_barrier: potential must be a barrier or l1 kind");
  }
  if (!(u.grid() == cfg_.grid)) throw DomainError("step_barrier: grid mismatch");
  if (u.max_abs() > 1.0 + 1e-6) throw DomainError("step_barrier: |u| must be <= 1");
  const GridSpec& g = cfg_.grid;
  const AdmmOptions& o = cfg_.admm;
  const double e2 = cfg_.eps * cfg_.eps;
  const double inv_tau = cfg_.tau.inverse();
  const SpectralSymbol psym = e2 * inv_tau + e2 * k2_;
  const FieldArray q = conc_prime(spec, u.values()) - e2 * inv_tau * u.values();

  const bool ell_one = spec.kind() == PotentialKind::EllOneAlpha;
  const double cpen = ell_one ? spec.parameter() + 1.0 : 0.0;
  auto prox = [&](const FieldArray& wv, double rho) -> FieldArray {
    if (!ell_one) return wv.cwiseMax(-1.0).cwiseMin(1.0);
    const double shrink = cpen / rho;
    return wv.unaryExpr([shrink](double x) {
      const double a = std::abs(x);
      if (a <= 1.0) return x;
      if (a <= 1.0 + shrink) return x >= 0.0 ? 1.0 : -1.0;
      return x - (x >= 0.0 ? shrink : -shrink);
    });
  };

  double rho = o.rho;
  FieldArray x = u.values().cwiseMax(-1.0).cwiseMin(1.0);
  FieldArray z = x;
  FieldArray y = FieldArray::Zero(g.n(), g.n());
  FieldArray px = apply_symbol(g, x, psym);
  SpectralSymbol ksym = psym + o.sigma + rho;
  double rp = 0.0, rd = 0.0;
  int it = 0;
  for (; it < o.max_iter; ++it) {
    const FieldArray b = o.sigma * x - q + rho * z - y;
    const FieldArray xt = solve_symbol(g, b, ksym);
    const FieldArray pxt = b - (o.sigma + rho) * xt;
    const FieldArray zr = o.alpha * xt + (1.0 - o.alpha) * z;
    x = o.alpha * xt + (1.0 - o.alpha) * x;
    px = o.alpha * pxt + (1.0 - o.alpha) * px;
    const FieldArray znew = prox(zr + y / rho, rho);
    y += rho * (zr - znew);
    z = znew;

    const FieldArray dual = px + q + y;
    rp = (x - z).abs().maxCoeff();
    rd = dual.abs().maxCoeff();
    if (rp <= o.primal_tol && rd <= o.dual_tol) {
      ++it;
      break;
    }
    if (o.adaptive_rho && (it + 1) % o.rho_interval == 0) {
      const double pscale = std::max({x.abs().maxCoeff(), z.abs().maxCoeff(), 1e-30});
      const double dscale =
          std::max({px.abs().maxCoeff(), y.abs().maxCoeff(), q.abs().maxCoeff(), 1e-30});
      const double ratio = std::sqrt((rp / pscale) / std::max(rd / dscale, 1e-30));
      const double cand = std::clamp(rho * ratio, 1e-6, 1e6);
      if (cand > 5.0 * rho || cand < 0.2 * rho) {
        rho = cand;
        ksym = psym + o.sigma + rho;
        px = apply_symbol(g, x, psym);
      }
    }
  }
  if (!(rp <= o.primal_tol && rd <= o.dual_tol)) {
    throw SolverError("step_barrier: ADMM did not converge", std::max(rp, rd), it);
  }
  ScalarField next(g, std::move(z));
  StepReport rep = finish(u, next, it, std::max(rp, rd));
  return {std::move(next), rep};
}

StepResult step_quadratic(const ScalarField& u, const StepperConfig& cfg) {
  return Stepper(cfg).step_quadratic(u);
}

StepResult step_quartic(const ScalarField& u, const StepperConfig& cfg) {
  return Stepper(cfg).step_quartic(u);
}

StepResult step_barrier(const ScalarField& u, const StepperConfig& cfg) {
  return Stepper(cfg).step_barrier(u);
}

RunResult run(const ScalarField& u0, const StepperConfig& cfg, int n_steps, const RunHooks& hooks) {
  if (n_steps < 0) throw DomainError("run: n_steps must be >= 0");
  const Stepper stepper(cfg);
  RunResult out{EnergyTrace{}, u0};
  EnergyTrace& tr = out.trace;
  std::ostringstream eps;
  eps.precision(17);
  eps << cfg.eps;
  tr.metadata["eps"] = eps.str();
  tr.metadata["tau"] = cfg.tau.str();
  tr.metadata["potential"] = cfg.potential.id();
  tr.metadata["n"] = std::to_string(cfg.grid.n());
  std::ostringstream len;
  len.precision(17);
  len << cfg.grid.length();
  tr.metadata["length"] = len.str();
  tr.initial_energy = mm_energy(u0, cfg.eps, cfg.potential);
  tr.initial_radius = interface_radius(u0);

  for (int k = 1; k <= n_steps; ++k) {
    try {
      StepResult s = stepper.step(out.final_field);
      StepRecord rec;
      rec.step = k;
      rec.energy = s.report.energy_after;
      rec.radius = interface_radius(s.u);
      rec.l2_move = s.report.l2_move;
      rec.lp_move = s.report.lp_move;
      rec.h1_move = s.report.h1_move;
      rec.inner_iterations = s.report.inner_iterations;
      tr.records.push_back(rec);
      out.final_field = std::move(s.u);
      if (hooks.on_step) hooks.on_step(k, out.final_field, s.report);
    } catch (const std::exception& e) {
      tr.failed = true;
      tr.failure = "step " + std::to_string(k) + ": " + e.what();
      break;
    }
  }
  return out;
}

}  // namespace acsplit
