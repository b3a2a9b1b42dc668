#include <doctest.h>

#include <cmath>
#include <numbers>

#include "acsplit/stepper.hpp"
#include "acsplit/thresholding.hpp"
#include "support.hpp"

using namespace acsplit;
using acsplit::testing::max_diff;
using acsplit::testing::random_field;

namespace {

StepperConfig config(int n, PotentialSpec pot, double eps, TimeStep tau) {
  return StepperConfig{GridSpec(n), pot, eps, tau};
}

/// Smooth field in (-1, 1) with a few modes; usable by every kind.
ScalarField smooth_field(const GridSpec& g) {
  return make_field(g, [](double x, double y) {
    return 0.8 * std::sin(2 * std::numbers::pi * x) * std::cos(2 * std::numbers::pi * y) +
           0.1 * std::cos(4 * std::numbers::pi * x);
  });
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config(16, PotentialSpec::standard(), 0.1, TimeStep::infinite()).validate(), DomainError);
  CHECK_THROWS_AS(config(16, PotentialSpec::quadratic_wr(100), -0.1, TimeStep(1)).validate(), DomainError);
  auto bad = config(16, PotentialSpec::standard(), 0.1, TimeStep(1));
  bad.newton.tol = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_NOTHROW(config(16, PotentialSpec::quadratic_wr(100), 0.1, TimeStep::infinite()).validate());
  CHECK_THROWS_AS(TimeStep(0.0), DomainError);
}

TEST_CASE("wells are fixed points") {
  const GridSpec g(16);
  const auto one = ScalarField::constant(g, 1.0);
  for (auto tau : {TimeStep(1.0), TimeStep::infinite()}) {
    const auto q = step_quadratic(one, config(16, PotentialSpec::quadratic_wr(100), 0.1, tau));
    CHECK(max_diff(q.u, one) < 1e-12);
    const auto b = step_barrier(one, config(16, PotentialSpec::barrier_abs(), 0.1, tau));
    CHECK(max_diff(b.u, one) < 1e-6);
  }
  const auto s = step_quartic(one, config(16, PotentialSpec::standard(), 0.1, TimeStep(10.0)));
  CHECK(max_diff(s.u, one) < 1e-12);
  const auto zero = ScalarField::constant(g, 0.0);
  const auto z = step_quartic(zero, config(16, PotentialSpec::standard(), 0.1, TimeStep(10.0)));
  CHECK(z.u.max_abs() < 1e-14);
}

TEST_CASE("quadratic step is preconditioned gradient descent") {
  const GridSpec g(64);
  const auto u = random_field(g, 21);
  for (double R : {1.0, 100.0}) {
    const auto pot = PotentialSpec::quadratic_wr(R);
    for (double tau : {1e-3, 0.1, 10.0}) {
      const double eps = 0.1;
      // grad E = -Lap u + W'(u)/eps^2, W' = 2u + W_conc'
      ScalarField grad(g);
      const auto lap = laplacian(u);
      for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
          grad(i, j) = -lap(i, j) + (2 * u(i, j) + w_conc_prime(pot, u(i, j))) / (eps * eps);
        }
      }
      const auto precond = HelmholtzOperator(g, 1 + 2 * tau / (eps * eps), tau).solve(grad);
      ScalarField gd(g, u.values() - tau * precond.values());
      const auto step = step_quadratic(u, config(64, pot, eps, TimeStep(tau)));
      CHECK(max_diff(step.u, gd) < 1e-9);
    }
  }
}

TEST_CASE("infinite step obeys the maximum principle") {
  const GridSpec g(64);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto u = random_field(g, seed);
    const auto s = step_quadratic(u, config(64, PotentialSpec::quadratic_bar(), 0.05, TimeStep::infinite()));
    CHECK(s.u.max_abs() <= 1.0 + 1e-12);
  }
}

TEST_CASE("quartic step solves its nonlinear equation") {
  const GridSpec g(32);
  const auto u = smooth_field(g);
  const double eps = 0.1, tau = 5.0;
  const auto cfg = config(32, PotentialSpec::standard(), eps, TimeStep(tau));
  const auto v = step_quartic(u, cfg).u;
  // (1 - tau Lap) v + (4 tau/eps^2) v^3 - u - (4 tau/eps^2) u
  const double c = 4 * tau / (eps * eps);
  const auto lap = laplacian(v);
  double res = 0;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      res = std::max(res, std::abs(v(i, j) - tau * lap(i, j) + c * std::pow(v(i, j), 3) - u(i, j) - c * u(i, j)));
    }
  }
  CHECK(res <= 1e-10 * (1 + (1 + c) * u.max_abs()));
}

TEST_CASE("barrier step is the box-constrained minimizer") {
  const GridSpec g(32);
  const auto u = smooth_field(g);
  const double eps = 0.1, tau = 1.0;
  auto cfg = config(32, PotentialSpec::barrier_quadratic(), eps, TimeStep(tau));
  cfg.admm.primal_tol = cfg.admm.dual_tol = 1e-10;
  cfg.admm.max_iter = 200000;
  const auto v = step_barrier(u, cfg).u;
  CHECK(v.max_abs() <= 1.0 + 1e-9);
  // gradient of the quadratic objective: (1/tau - Lap) v - u/tau + W_conc'(u)/eps^2
  const auto lap = laplacian(v);
  double worst = 0;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      const double grad = v(i, j) / tau - lap(i, j) - u(i, j) / tau + w_conc_prime(cfg.potential, u(i, j)) / (eps * eps);
      // KKT: zero gradient inside the box, gradient pushing outward at the bounds
      if (std::abs(v(i, j)) < 1 - 1e-6) worst = std::max(worst, std::abs(grad));
      else worst = std::max(worst, std::max(0.0, grad * v(i, j)));
    }
  }
  CHECK(worst < 1e-4 / (eps * eps));
}

TEST_CASE("barrier transition band width") {
  const int n = 128;
  const GridSpec g(n);
  const double eps = 0.05;
  const auto u0 = make_field(g, [](double x, double) { return x < 0.25 || x >= 0.75 ? -1.0 : 1.0; });
  auto cfg = config(n, PotentialSpec::barrier_abs(), eps, TimeStep::infinite());
  cfg.admm.primal_tol = cfg.admm.dual_tol = 1e-9;
  cfg.admm.max_iter = 200000;
  const auto u1 = step_barrier(u0, cfg).u;
  int inside = 0;
  for (int i = 0; i < n; ++i) inside += std::abs(u1(i, 0)) < 1 - 1e-4;
  const double width = 0.5 * inside * g.h();  // two interfaces
  CHECK(std::abs(width - 2 * std::numbers::sqrt2 * eps) <= 2 * g.h());
}

TEST_CASE("l1 penalty matches the barrier inside the box") {
  const GridSpec g(32);
  const auto u = smooth_field(g);
  for (double alpha : {0.5, 2.0}) {
    auto a = config(32, PotentialSpec::barrier_abs(), 0.1, TimeStep(1.0));
    a.admm.primal_tol = a.admm.dual_tol = 1e-10;
    a.admm.max_iter = 200000;
    auto b = a;
    b.potential = PotentialSpec::ell_one(alpha);
    CHECK(max_diff(step_barrier(u, a).u, step_barrier(u, b).u) < 1e-7);
  }
}

TEST_CASE("every kind decreases energy and satisfies the dissipation inequality") {
  const GridSpec g(32);
  const auto u0 = circle_indicator(g, 0.3);
  struct Case {
    PotentialSpec pot;
    TimeStep tau;
  };
  const double eps = 0.1;
  const std::vector<Case> cases{
      {PotentialSpec::quadratic_wr(100), TimeStep(1e-2 * eps * eps)},
      {PotentialSpec::quadratic_wr(100), TimeStep::infinite()},
      {PotentialSpec::quadratic_bar(), TimeStep(eps)},
      {PotentialSpec::standard(), TimeStep(eps * eps)},
      {PotentialSpec::standard(), TimeStep(1e3)},
      {PotentialSpec::barrier_quadratic(), TimeStep(1.0)},
      {PotentialSpec::barrier_abs(), TimeStep::infinite()}};
  for (const auto& c : cases) {
    CAPTURE(c.pot.id());
    CAPTURE(c.tau.str());
    const auto cfg = config(32, c.pot, eps, c.tau);
    const Stepper stepper(cfg);
    ScalarField u = u0;
    for (int k = 0; k < 5; ++k) {
      const auto s = stepper.step(u);
      CHECK(s.report.energy_after <= s.report.energy_before + 1e-8 * (1 + std::abs(s.report.energy_before)));
      for (const auto& pair : c.pot.curvature_pairs()) {
        CHECK(dissipation_check(u, s.u, eps, c.tau, c.pot, pair).holds);
      }
      u = s.u;
    }
  }
}

TEST_CASE("run loop") {
  const GridSpec g(16);
  const auto u0 = circle_indicator(g, 0.3);
  auto cfg = config(16, PotentialSpec::quadratic_wr(100), 0.1, TimeStep(1.0));
  const auto empty = run(u0, cfg, 0);
  CHECK(empty.trace.records.empty());
  CHECK(max_diff(empty.final_field, u0) == 0.0);
  CHECK(empty.trace.metadata.at("potential") == "wr:R=100");

  int calls = 0;
  RunHooks hooks;
  hooks.on_step = [&](int, const ScalarField&, const StepReport&) { ++calls; };
  const auto three = run(u0, cfg, 3, hooks);
  CHECK(three.trace.records.size() == 3);
  CHECK(calls == 3);
  CHECK(three.trace.records.back().step == 3);

  auto strict = config(16, PotentialSpec::standard(), 0.1, TimeStep(1e3));
  strict.newton.max_iter = 1;
  const auto failed = run(u0, strict, 4);
  CHECK(failed.trace.failed);
  CHECK(failed.trace.failure.rfind("step 1", 0) == 0);
  CHECK(failed.trace.records.empty());

  CHECK_THROWS_AS(step_barrier(ScalarField::constant(g, 1.5), config(16, PotentialSpec::barrier_abs(), 0.1, TimeStep(1))),
                  DomainError);
  CHECK_THROWS_AS(step_quartic(u0, cfg), DomainError);
}
