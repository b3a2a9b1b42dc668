#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "acsplit/diagnostics.hpp"
#include "acsplit/stepper.hpp"
#include "support.hpp"

using namespace acsplit;
using acsplit::testing::random_field;

TEST_CASE("time step values") {
  const auto inf = TimeStep::infinite();
  CHECK(inf.is_infinite());
  CHECK(inf.inverse() == 0.0);
  CHECK(std::isinf(inf.value()));
  CHECK(inf.str() == "inf");
  CHECK(TimeStep(INFINITY).is_infinite());
  CHECK(TimeStep(0.25).inverse() == 4.0);
  CHECK(TimeStep(100).str() == "100");
  CHECK_THROWS_AS(TimeStep(-1), DomainError);
}

TEST_CASE("energy of wells and of a one dimensional profile") {
  const GridSpec g(64);
  CHECK(mm_energy(ScalarField::constant(g, 1.0), 0.1, PotentialSpec::quadratic_bar()) == doctest::Approx(0.0));
  CHECK(mm_energy(ScalarField::constant(g, -1.0), 0.1, PotentialSpec::barrier_abs()) == doctest::Approx(0.0));

  // two transitions at x = 1/4 and 3/4, unit length each
  const double eps = 0.05;
  const GridSpec fine(512);
  const auto u = make_field(fine, [&](double x, double) { return phi_bar((0.25 - std::abs(x - 0.5)) / eps); });
  const double e = mm_energy(u, eps, PotentialSpec::quadratic_bar());
  CHECK(std::abs(e / (2 * std::numbers::sqrt2) - 1) < 0.05);

  CHECK_THROWS_AS(mm_energy(ScalarField::constant(g, 1.01), 0.1, PotentialSpec::barrier_quadratic()), DomainError);
  CHECK(mm_energy(ScalarField::constant(g, 1.0 + 1e-8), 0.1, PotentialSpec::barrier_quadratic()) == doctest::Approx(0.0));
}

TEST_CASE("dissipation check on identical fields") {
  const GridSpec g(32);
  const auto u = random_field(g, 2);
  const auto c = dissipation_check(u, u, 0.1, TimeStep(1), PotentialSpec::quadratic_wr(100));
  CHECK(c.lhs == 0.0);
  CHECK(c.rhs == 0.0);
  CHECK(c.holds);
  CHECK_THROWS_AS(dissipation_check(u, u, 0.1, TimeStep(1), PotentialSpec::barrier_abs()), DomainError);
}

TEST_CASE("drift bound") {
  CHECK(drift_bound(3.0, 0, 0.1, 2) == 0.0);
  CHECK(drift_bound(3.0, 50, 0.1, 2) == doctest::Approx(std::sqrt(2 * 50 * 0.1 * 3.0)));
  CHECK(drift_bound(2.0, 10, 0.04, 4) ==
        doctest::Approx(std::pow(2.0, 0.25) * std::pow(10 * std::cbrt(0.04), 0.75)));
  CHECK_THROWS_AS(drift_bound(-1, 1, 0.1, 2), DomainError);

  const GridSpec g(64);
  const StepperConfig cfg{g, PotentialSpec::quadratic_wr(100), 0.05, TimeStep(1e3)};
  const auto u0 = circle_indicator(g, 0.4);
  const auto res = run(u0, cfg, 200);
  const double e0 = mm_energy(u0, cfg.eps, cfg.potential);
  ScalarField diff(g, res.final_field.values() - u0.values());
  CHECK(lp_norm(diff, 2) <= drift_bound(e0, 200, cfg.eps, 2));
  CHECK(res.trace.energy_monotone());
}

TEST_CASE("interface radius") {
  const GridSpec g(512);
  CHECK(std::abs(*interface_radius(circle_indicator(g, 0.4)) - 0.4) <= 2 * g.h());
  CHECK_FALSE(interface_radius(ScalarField::constant(g, -1.0)).has_value());
}

TEST_CASE("effective step fit recovers its generator") {
  const double eps = 0.05, c = 0.29;
  std::vector<int> steps;
  std::vector<double> radii;
  for (int k = 1; k <= 40; ++k) {
    steps.push_back(k);
    radii.push_back(std::sqrt(0.16 - 2 * c * eps * eps * k));
  }
  const auto fit = fit_effective_step(steps, radii, eps, 0.0);
  CHECK(fit.c_eff == doctest::Approx(c).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.n_points == 40);
  // samples below the cut-off are ignored
  const auto cut = fit_effective_step(steps, radii, eps, 0.35);
  CHECK(cut.n_points < 40);
  const std::vector<int> few_steps(steps.begin(), steps.begin() + 9);
  const std::vector<double> few_radii(radii.begin(), radii.begin() + 9);
  CHECK_THROWS_AS(fit_effective_step(few_steps, few_radii, eps, 0.0), DomainError);
}

TEST_CASE("effective step is scale consistent") {
  // doubling eps and quartering the steps covers the same time
  auto fit_for = [](double eps, int steps) {
    const GridSpec g(128);
    const StepperConfig cfg{g, PotentialSpec::quadratic_wr(100), eps, TimeStep(100)};
    return fit_effective_step(run(circle_indicator(g, 0.4), cfg, steps).trace, eps);
  };
  const auto a = fit_for(0.05, 120);
  const auto b = fit_for(0.1, 30);
  CHECK(std::abs(a.c_eff - b.c_eff) <= 0.02);
}

TEST_CASE("trace CSV round trip and monotonicity") {
  EnergyTrace t;
  t.metadata = {{"eps", "0.1"}, {"n", "64"}, {"length", "1"}};
  t.initial_energy = 5.0;
  t.initial_radius = 0.4;
  t.records.push_back({1, 4.5, 0.39, 0.1, 0.1, 1.0, 3});
  t.records.push_back({2, 4.0, std::nullopt, 0.05, 0.05, 0.5, 4});
  const auto path = std::filesystem::temp_directory_path() / "acsplit_trace.csv";
  write_trace_csv(t, path);
  const auto back = read_trace_csv(path);
  CHECK(back.metadata.at("eps") == "0.1");
  CHECK(back.initial_energy == 5.0);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].radius == 0.39);
  CHECK_FALSE(back.records[1].radius.has_value());
  CHECK(back.records[1].inner_iterations == 4);
  CHECK(back.energy_monotone());
  t.records.push_back({3, 4.1, 0.3, 0, 0, 0, 1});
  CHECK_FALSE(t.energy_monotone());
  std::filesystem::remove(path);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8}, y{0.02, 0.08, 0.32, 1.28};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
}
