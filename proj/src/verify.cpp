#include "acsplit/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>

#include "acsplit/experiments.hpp"
#include "acsplit/radial_obstacle.hpp"
#include "acsplit/thresholding.hpp"

namespace acsplit {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

class Sink {
 public:
  explicit Sink(int criterion) : criterion_(criterion) {}

  void near(std::string id, double measured, double expected, double tol) {
    add(std::move(id), std::abs(measured - expected) <= tol, measured, expected, tol);
  }
  void at_most(std::string id, double measured, double bound) {
    add(std::move(id), measured <= bound, measured, bound, 0.0);
  }
  void at_least(std::string id, double measured, double bound) {
    add(std::move(id), measured >= bound, measured, bound, 0.0);
  }
  void count(std::string id, int passed, int total) {
    add(std::move(id), passed == total, passed, total, 0.0);
  }
  void add(std::string id, bool pass, double measured, double expected, double tol) {
    out_.push_back({std::move(id), criterion_, pass, measured, expected, tol});
  }
  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  int criterion_;
  std::vector<CheckResult> out_;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ---------------------------------------------------------------- 1
void criterion1(Sink& s, const VerifyOptions& o) {
  const KernelMoments km = kernel_moments();
  s.near("kernel_m0", km.m0, 1.0, 1e-6);
  s.near("kernel_m2", km.m2, 6.0, 1e-6);
  s.near("kernel_plane", km.plane_integral, 1.5, 1e-6);

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 9; ++i) a.data()[i] = gauss(rng);
    const Eigen::Matrix3d S = 0.5 * (a + a.transpose());
    Eigen::Vector3d n(gauss(rng), gauss(rng), gauss(rng));
    n.normalize();
    const double expect = -0.5 * (S.trace() - n.dot(S * n));
    worst = std::max(worst, std::abs(kernel_velocity(S, n) - expect));
  }
  s.near("kernel_velocity_max_err", worst, 0.0, 1e-6);

  const BetaMin b2 = beta_min(2.0);
  const BetaMin b4 = beta_min(4.0);
  s.near("beta_p2", b2.value, 1.0, 1e-8);
  s.near("beta_p4", b4.value, 1.0 / 3.0, 1e-8);
  s.near("beta_p4_argmin", b4.argmin, 3.0, 1e-4);
  s.near("c_wbar", normalization_constant(PotentialSpec::quadratic_bar()), kSqrt2, 1e-8);
  for (double R : {1.0, 10.0, 100.0}) {
    s.near("wr_second_at_1_R" + fmt("%g", R), w_second(PotentialSpec::quadratic_wr(R), 1.0),
           2.0 * R / (R + 1.0), 1e-8);
  }
}

// ---------------------------------------------------------------- 2
void criterion2(Sink& s, const VerifyOptions&) {
  int total = 0, ok_d = 0, ok_2 = 0, ok_bound = 0;
  double worst_d = 0.0, worst_2 = 0.0;
  for (int d : {3, 4, 5, 10}) {
    for (double r : {1.0, 2.0, 5.0}) {
      for (double eps : {0.2, 0.1, 0.05, 0.01}) {
        const RadialProblem prob{r, eps, d};
        try {
          prob.validate();
        } catch (const DomainError&) {
          continue;
        }
        ++total;
        const RadialSolution sol(prob);
        const double rd = std::pow(r, d);
        const double id_d = std::abs(std::pow(sol.r_i(), d) + std::pow(sol.r_o(), d) - 2.0 * rd) / (2.0 * rd);
        const double rhs2 = 2.0 * r * r - 4.0 * (d - 2) * eps * eps;
        const double id_2 = std::abs(sol.r_i() * sol.r_i() + sol.r_o() * sol.r_o() - rhs2) / rhs2;
        worst_d = std::max(worst_d, id_d);
        worst_2 = std::max(worst_2, id_2);
        ok_d += id_d <= 1e-10;
        ok_2 += id_2 <= 1e-10;
        ok_bound += r - sol.r_i() <= 2.0 * eps + 10.0 * eps * eps;
      }
    }
  }
  s.count("radii_power_identity", ok_d, total);
  s.near("radii_power_identity_max_rel", worst_d, 0.0, 1e-10);
  s.count("radii_square_identity", ok_2, total);
  s.near("radii_square_identity_max_rel", worst_2, 0.0, 1e-10);
  s.count("inner_radius_bound", ok_bound, total);

  const std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025, 0.0125};
  for (int d : {3, 10}) {
    const ScalingStudy st = scaling_study(2.0, d, eps_list);
    const std::string tag = "_d" + std::to_string(d);
    s.count("scaling_rows" + tag, static_cast<int>(st.rows.size()), static_cast<int>(eps_list.size()));
    s.near("slope_r_minus_rnew" + tag, st.slope_rnew.value_or(NAN), 2.0, 0.15);
    s.near("slope_r_minus_ri" + tag, st.slope_ri.value_or(NAN), 1.0, 0.1);
    s.near("slope_ro_minus_r" + tag, st.slope_ro.value_or(NAN), 1.0, 0.1);
  }
}

// ---------------------------------------------------------------- 3
void criterion3(Sink& s, const VerifyOptions&) {
  const GridSpec g(512);
  const ScalarField u0 = make_field(g, [](double x, double) { return sign_pos(x - 0.5); });
  for (double eps : {0.1, 0.05}) {
    for (double tau : {1.0, 100.0, std::numeric_limits<double>::infinity()}) {
      const StepperConfig cfg{g, PotentialSpec::quadratic_bar(), eps, TimeStep(tau)};
      const ScalarField u1 = step_quadratic(u0, cfg).u;
      double err = 0.0;
      for (int i = 0; i < g.n(); ++i) {
        const double x = g.coord(i) - 0.5;
        if (std::abs(x) > eps) continue;  // transition core, far from the seam at 0
        const double exact = one_d_first_step(x, eps, tau);
        err = std::max(err, (u1.values().row(i) - exact).abs().maxCoeff());
      }
      const double tol = 1e-6 + 10.0 * std::exp(-kSqrt2 * g.length() / (2.0 * eps));
      s.near("one_d_step_eps" + fmt("%g", eps) + "_tau" + fmt("%g", tau), err, 0.0, tol);
    }
  }
}

// ---------------------------------------------------------------- 4
void criterion4(Sink& s, const VerifyOptions& o) {
  struct Case {
    PotentialSpec pot;
    double eps;
    TimeStep tau;
  };
  std::vector<Case> cases;
  for (const PotentialSpec& pot : {PotentialSpec::quadratic_wr(100.0), PotentialSpec::standard(),
                                   PotentialSpec::barrier_quadratic()}) {
    for (double eps : {0.1, 0.05}) {
      for (double tau : {eps * eps, eps, 1.0, 1e3}) cases.push_back({pot, eps, TimeStep(tau)});
      if (pot.kind() != PotentialKind::Standard) cases.push_back({pot, eps, TimeStep::infinite()});
    }
  }
  struct Tally {
    int steps = 0, mono = 0, dissip = 0, dissip_checks = 0;
    bool failed = false;
  };
  std::vector<Tally> tallies(cases.size());
  parallel_for(static_cast<int>(cases.size()), o.threads, [&](int k) {
    const Case& c = cases[k];
    CircleRun cr;
    cr.potential = c.pot;
    cr.eps = c.eps;
    cr.tau = c.tau;
    cr.steps = 50;
    const StepperConfig cfg = cr.config();
    ScalarField prev = circle_indicator(cfg.grid, cr.r0);
    Tally& t = tallies[k];
    RunHooks hooks;
    hooks.on_step = [&](int, const ScalarField& u, const StepReport& r) {
      ++t.steps;
      t.mono += r.energy_after <= r.energy_before + 1e-6;
      for (const CurvaturePair& pair : c.pot.curvature_pairs()) {
        ++t.dissip_checks;
        t.dissip += dissipation_check(prev, u, c.eps, c.tau, c.pot, pair).holds;
      }
      prev = u;
    };
    t.failed = run_circle(cr, hooks).trace.failed;
  });
  Tally sum;
  int failed_runs = 0;
  for (const Tally& t : tallies) {
    sum.steps += t.steps;
    sum.mono += t.mono;
    sum.dissip += t.dissip;
    sum.dissip_checks += t.dissip_checks;
    failed_runs += t.failed;
  }
  s.count("lattice_runs_completed", static_cast<int>(cases.size()) - failed_runs,
          static_cast<int>(cases.size()));
  s.count("lattice_steps", sum.steps, static_cast<int>(cases.size()) * 50);
  s.count("energy_decrease_steps", sum.mono, sum.steps);
  s.count("dissipation_steps", sum.dissip, sum.dissip_checks);
}

// ---------------------------------------------------------------- 5
void criterion5(Sink& s, const VerifyOptions&) {
  const GridSpec g(256);
  const double eps = 0.1, r0 = 0.4;
  const ScalarField u0 = circle_indicator(g, r0);
  const double bound = (kSqrt2 + 1.0) * 2.0 * std::numbers::pi * r0;
  for (const PotentialSpec& pot : {PotentialSpec::quadratic_wr(100.0), PotentialSpec::quadratic_bar()}) {
    for (double tau : {eps, 1.0, 100.0, std::numeric_limits<double>::infinity()}) {
      const StepperConfig cfg{g, pot, eps, TimeStep(tau)};
      const StepResult r = step_quadratic(u0, cfg);
      s.at_most("first_step_energy_" + pot.id() + "_tau" + fmt("%g", tau), r.report.energy_after, bound);
    }
  }
}

// ---------------------------------------------------------------- 6, 7
struct FitRun {
  std::string id;
  CircleRun spec;
  RunResult result{EnergyTrace{}, ScalarField(GridSpec(8))};
};

std::vector<FitRun> fit_runs(const VerifyOptions& o) {
  std::vector<FitRun> runs;
  auto add = [&](const PotentialSpec& pot, double eps, double tau) {
    FitRun f;
    f.spec.potential = pot;
    f.spec.eps = eps;
    f.spec.tau = TimeStep(tau);
    f.id = pot.id() + "_eps" + fmt("%g", eps) + "_tau" + fmt("%g", tau);
    runs.push_back(std::move(f));
  };
  for (double eps : {0.1, 0.05}) {
    add(PotentialSpec::quadratic_wr(100.0), eps, 100.0);
    add(PotentialSpec::quadratic_wr(100.0), eps, 1e5);
    add(PotentialSpec::standard(), eps, 1e5);
    add(PotentialSpec::barrier_quadratic(), eps, 1e5);
  }
  parallel_for(static_cast<int>(runs.size()), o.threads,
               [&](int k) { runs[k].result = run_circle(runs[k].spec); });
  return runs;
}

void criterion6(Sink& s, const std::vector<FitRun>& runs) {
  std::map<std::string, double> c_eff;
  for (const FitRun& f : runs) {
    if (f.result.trace.failed) {
      s.add("run_" + f.id, false, 0.0, 1.0, 0.0);
      continue;
    }
    const double c = fit_effective_step(f.result.trace, f.spec.eps).c_eff;
    c_eff[f.id] = c;
    const double ref = reference_c_eff(f.spec.potential);
    s.near("c_eff_" + f.id, c, ref, 0.3 * ref);
  }
  for (const char* eps : {"0.1", "0.05"}) {
    const std::string a = std::string("wr:R=100_eps") + eps + "_tau100";
    const std::string b = std::string("wr:R=100_eps") + eps + "_tau100000";
    if (c_eff.count(a) && c_eff.count(b)) {
      s.near(std::string("c_eff_tau_spread_eps") + eps, std::abs(c_eff[a] - c_eff[b]) / c_eff[a], 0.0, 0.1);
    }
  }
}

void criterion7(Sink& s, const std::vector<FitRun>& runs) {
  for (const FitRun& f : runs) {
    const EnergyTrace& t = f.result.trace;
    const int n_steps = static_cast<int>(t.records.size());
    const ScalarField u0 = circle_indicator(GridSpec(f.spec.n), f.spec.r0);
    const ScalarField diff(u0.grid(), f.result.final_field.values() - u0.values());
    const double bound = drift_bound(t.initial_energy, n_steps, f.spec.eps, 2.0);
    s.at_most("drift_" + f.id, lp_norm(diff, 2.0), bound);
  }
}

// ---------------------------------------------------------------- 8
ScalarField random_binary(const GridSpec& g, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  ScalarField u(g);
  for (Eigen::Index k = 0; k < u.values().size(); ++k) u.values().data()[k] = coin(rng) ? 1.0 : -1.0;
  return u;
}

void criterion8(Sink& s, const VerifyOptions& o) {
  const GridSpec g(128);
  const double eps = 0.05;
  std::mt19937_64 rng(o.seed + 8);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  const StepperConfig cfg{g, PotentialSpec::quadratic_bar(), eps, TimeStep::infinite()};
  double worst = 0.0;
  std::vector<ScalarField> inputs{circle_indicator(g, 0.4)};
  for (int k = 0; k < 4; ++k) {
    ScalarField u(g);
    for (Eigen::Index i = 0; i < u.values().size(); ++i) u.values().data()[i] = unif(rng);
    inputs.push_back(std::move(u));
  }
  for (const ScalarField& u : inputs) {
    const ScalarField a = mbo_step(MboState::from(u), eps).u;
    const ScalarField b = step_quadratic(u, cfg).u;
    worst = std::max(worst, (a.values() - b.values()).abs().maxCoeff());
  }
  s.near("mbo_vs_quadratic_step_max_diff", worst, 0.0, 1e-10);

  const MboRun run = mbo_run(random_binary(g, rng), eps, 100);
  int mono = 0;
  for (std::size_t k = 1; k < run.eo_energies.size(); ++k) {
    const double prev = run.eo_energies[k - 1];
    mono += run.eo_energies[k] <= prev + 1e-8 * std::abs(prev);
  }
  s.count("eo_energy_nonincreasing", mono, static_cast<int>(run.eo_energies.size()) - 1);

  int ordered = 0;
  for (int k = 0; k < 50; ++k) {
    const ScalarField lo = random_binary(g, rng);
    const ScalarField extra = random_binary(g, rng);
    const ScalarField hi(g, lo.values().max(extra.values()));
    const ScalarField a = mbo_step(MboState::from(lo), eps).u;
    const ScalarField b = mbo_step(MboState::from(hi), eps).u;
    ordered += (b.values() - a.values()).minCoeff() >= -1e-12;
  }
  s.count("comparison_principle_pairs", ordered, 50);
}

// ---------------------------------------------------------------- 9
void criterion9(Sink& s, const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed + 9);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  for (double p : {2.0, 3.0, 4.0, 6.0}) {
    const double beta = beta_min(p).value;
    int ok = 0;
    constexpr int kSamples = 100000;
    for (int k = 0; k < kSamples; ++k) ok += check_power_law(p, beta, box(rng), box(rng));
    s.count("power_law_p" + fmt("%g", p), ok, kSamples);
  }

  const std::vector<PotentialSpec> kinds{
      PotentialSpec::quadratic_wr(1.0),  PotentialSpec::quadratic_wr(100.0), PotentialSpec::quadratic_bar(),
      PotentialSpec::standard(),         PotentialSpec::barrier_abs(),       PotentialSpec::barrier_quadratic(),
      PotentialSpec::ell_one(0.5)};
  double split = 0.0;
  for (const PotentialSpec& k : kinds) {
    const double lim = (k.kind() == PotentialKind::BarrierAbs || k.kind() == PotentialKind::BarrierQuadratic) ? 1.0 : 2.0;
    for (int i = 0; i <= 4000; ++i) {
      const double u = -lim + 2.0 * lim * i / 4000.0;
      split = std::max(split, std::abs(w(k, u) - w_vex(k, u) - w_conc(k, u)));
    }
  }
  s.near("potential_split_max_err", split, 0.0, 1e-12);

  int below = 0, total = 0;
  for (double R : {1.0, 10.0, 100.0, std::numeric_limits<double>::infinity()}) {
    const PotentialSpec k = std::isinf(R) ? PotentialSpec::quadratic_bar() : PotentialSpec::quadratic_wr(R);
    for (int i = 0; i < 10000; ++i) {
      const double z = -1.0 + 2.0 * (i + 0.5) / 10000.0;
      ++total;
      below += w(k, z) <= (1.0 - std::abs(z)) * (1.0 - std::abs(z)) + 1e-14;
    }
  }
  s.count("wr_below_quadratic_envelope", below, total);

  const std::vector<PotentialSpec> profiled{
      PotentialSpec::quadratic_wr(1.0), PotentialSpec::quadratic_wr(100.0), PotentialSpec::quadratic_bar(),
      PotentialSpec::standard(), PotentialSpec::barrier_abs(), PotentialSpec::barrier_quadratic()};
  for (const PotentialSpec& k : profiled) {
    double res = 0.0;
    const double xmax = k.kind() == PotentialKind::BarrierAbs ? kSqrt2
                        : k.kind() == PotentialKind::BarrierQuadratic ? std::numbers::pi / (2.0 * kSqrt2)
                        : 4.0;
    // Five-point difference quotient, independent of optimal_profile_derivative.
    constexpr double h = 2e-4;
    auto phi = [&k](double y) { return optimal_profile(k, y); };
    for (int i = 0; i < 1000; ++i) {
      const double x = -xmax + 2.0 * xmax * (i + 0.5) / 1000.0;
      const double d = (-phi(x + 2 * h) + 8 * phi(x + h) - 8 * phi(x - h) + phi(x - 2 * h)) / (12 * h);
      res = std::max(res, std::abs(d - std::sqrt(2.0 * std::max(0.0, w(k, phi(x))))));
    }
    s.near("profile_ode_" + k.id(), res, 0.0, 1e-8);
  }

  // Barrier / l1 equivalence from a relaxed circle.
  {
    const GridSpec g(64);
    const double eps = 0.1;
    StepperConfig base{g, PotentialSpec::barrier_abs(), eps, TimeStep(1.0)};
    base.admm.primal_tol = base.admm.dual_tol = 1e-9;
    const ScalarField u0 = step_barrier(circle_indicator(g, 0.3), base).u;
    for (double tau : {1.0, std::numeric_limits<double>::infinity()}) {
      base.tau = TimeStep(tau);
      base.potential = PotentialSpec::barrier_abs();
      const ScalarField ref = step_barrier(u0, base).u;
      for (double alpha : {0.0, 0.5, 2.0}) {
        // Different ADMM settings, so the two solves share no iterates.
        StepperConfig c = base;
        c.potential = PotentialSpec::ell_one(alpha);
        c.admm.rho = 1.0;
        c.admm.alpha = 1.0;
        c.admm.adaptive_rho = false;
        c.admm.max_iter = 200000;
        const ScalarField v = step_barrier(u0, c).u;
        s.near("barrier_l1_equivalence_alpha" + fmt("%g", alpha) + "_tau" + fmt("%g", tau),
               (v.values() - ref.values()).abs().maxCoeff(), 0.0, 1e-6);
      }
    }
  }

  // Spectral solver.
  {
    const GridSpec g(64);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_field = [&] {
      ScalarField u(g);
      for (Eigen::Index i = 0; i < u.values().size(); ++i) u.values().data()[i] = unif(rng);
      return u;
    };
    double round_trip = 0.0, adjoint = 0.0, definite = -INFINITY;
    for (auto [a, b] : {std::pair{1.0, 1.0}, {0.5, 1e-3}, {1e3, 1.0}, {1.0, 1e2}, {2.0, 0.0}}) {
      const HelmholtzOperator op(g, a, b);
      const ScalarField u = random_field();
      const ScalarField back = op.solve(op.apply(u));
      round_trip = std::max(round_trip, (back.values() - u.values()).abs().maxCoeff() / u.max_abs());
    }
    for (int k = 0; k < 5; ++k) {
      const ScalarField u = random_field(), v = random_field();
      const double l = l2_inner(laplacian(u), v), r = l2_inner(u, laplacian(v));
      adjoint = std::max(adjoint, std::abs(l - r) / (std::abs(l) + std::abs(r)));
      definite = std::max(definite, l2_inner(laplacian(u), u));
    }
    s.near("helmholtz_round_trip_rel", round_trip, 0.0, 1e-10);
    s.near("laplacian_self_adjoint_rel", adjoint, 0.0, 1e-10);
    s.at_most("laplacian_quadratic_form_max", definite, 1e-12);
  }
}

constexpr double kBudget[kCriteria + 1] = {0, 1.0, 1.0, 5.0, 300.0, 10.0, 600.0, 600.0, 60.0, 600.0};

template <class F>
void timed(Sink& s, int criterion, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.at_most("c" + std::to_string(criterion) + "_runtime_s", dt, kBudget[criterion]);
}

}  // namespace

std::vector<CheckResult> verify_all(const VerifyOptions& opts, const std::vector<int>& criteria) {
  std::vector<CheckResult> out;
  std::optional<std::vector<FitRun>> runs;
  for (int c : criteria) {
    if (c < 1 || c > kCriteria) throw DomainError("verify: unknown criterion " + std::to_string(c));
    Sink s(c);
    switch (c) {
      case 1: timed(s, c, [&] { criterion1(s, opts); }); break;
      case 2: timed(s, c, [&] { criterion2(s, opts); }); break;
      case 3: timed(s, c, [&] { criterion3(s, opts); }); break;
      case 4: timed(s, c, [&] { criterion4(s, opts); }); break;
      case 5: timed(s, c, [&] { criterion5(s, opts); }); break;
      case 6:
      case 7:
        timed(s, c, [&] {
          if (!runs) runs = fit_runs(opts);
          if (c == 6) criterion6(s, *runs);
          else criterion7(s, *runs);
        });
        break;
      case 8: timed(s, c, [&] { criterion8(s, opts); }); break;
      case 9: timed(s, c, [&] { criterion9(s, opts); }); break;
    }
    for (auto& r : s.take()) out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> verify_criterion(int criterion, const VerifyOptions& opts) {
  return verify_all(opts, {criterion});
}

std::string format_check(const CheckResult& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s %.10g %.10g %.3g", c.id.c_str(), c.pass ? "PASS" : "FAIL",
                c.measured, c.expected, c.tolerance);
  return buf;
}

}  // namespace acsplit
