#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "acsplit/radial_obstacle.hpp"

using namespace acsplit;

namespace {

std::vector<RadialProblem> lattice() {
  std::vector<RadialProblem> out;
  for (int d : {3, 4, 5, 10}) {
    for (double r : {1.0, 2.0, 5.0}) {
      for (double eps : {0.2, 0.1, 0.05, 0.01}) {
        const RadialProblem p{r, eps, d};
        if (r > 2 * eps * std::sqrt(d - 2.0)) out.push_back(p);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("problem validation") {
  CHECK_THROWS_AS((RadialProblem{2.0, 0.1, 2}.validate()), DomainError);
  CHECK_THROWS_AS((RadialProblem{0.3, 0.2, 10}.validate()), DomainError);
  CHECK_THROWS_AS((RadialProblem{-1.0, 0.1, 3}.validate()), DomainError);
  CHECK_NOTHROW((RadialProblem{2.0, 0.2, 10}.validate()));
  CHECK(unit_ball_volume(3) == doctest::Approx(4 * std::numbers::pi / 3));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("auxiliary function") {
  const RadialProblem p{2.0, 0.2, 3};
  CHECK(xi(2.0, p) == doctest::Approx(std::sqrt(4.0 - 4 * 0.04) - 2.0));
  CHECK(xi(2.0, p) < 0);
  const RadialProblem small{2.0, 1e-4, 3};
  CHECK(xi(0.0, small) == doctest::Approx((std::sqrt(2.0) - std::cbrt(2.0)) * 2.0).epsilon(1e-6));
  CHECK(xi(0.0, small) > 0);
  double prev = xi(0.0, p);
  for (int k = 1; k <= 1000; ++k) {
    const double v = xi(2.0 * k / 1000, p);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(xi(2.5, p), DomainError);
}

TEST_CASE("radii identities over the lattice") {
  for (const auto& p : lattice()) {
    CAPTURE(p.d);
    CAPTURE(p.r);
    CAPTURE(p.eps);
    const auto [ri, ro] = solve_radii(p);
    const double rd = std::pow(p.r, p.d);
    CHECK(std::abs(std::pow(ri, p.d) + std::pow(ro, p.d) - 2 * rd) <= 1e-10 * 2 * rd);
    const double sq = 2 * p.r * p.r - 4 * (p.d - 2) * p.eps * p.eps;
    CHECK(std::abs(ri * ri + ro * ro - sq) <= 1e-10 * sq);
    CHECK(p.r - ri <= 2 * p.eps + 10 * p.eps * p.eps);
    CHECK(ri < p.r);
    CHECK(ro > p.r);
  }
  const auto tiny = solve_radii(RadialProblem{2.0, 1e-6, 3});
  CHECK(tiny.r_i == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(tiny.r_o == doctest::Approx(2.0).epsilon(1e-5));
  const auto d3 = solve_radii(RadialProblem{2.0, 0.2, 3});
  CHECK(2.0 - d3.r_i <= 0.4 + 10 * 0.04);
}

TEST_CASE("piecewise solution is C1, monotone, concave then convex") {
  for (const auto& p : {RadialProblem{2.0, 0.2, 3}, RadialProblem{2.0, 0.05, 3}, RadialProblem{2.0, 0.2, 10},
                        RadialProblem{1.0, 0.1, 5}}) {
    const RadialSolution sol(p);
    const double ri = sol.r_i(), ro = sol.r_o(), r = p.r;
    CHECK(sol.u(0.5 * ri) == 1.0);
    CHECK(sol.u(ro * 1.01) == -1.0);
    CHECK(sol.a() == doctest::Approx(1 + ri * ri / (2 * (p.d - 2) * p.eps * p.eps)));
    CHECK(sol.c() == doctest::Approx(-(1 + ro * ro / (2 * (p.d - 2) * p.eps * p.eps))));
    const double omega = unit_ball_volume(p.d);
    CHECK(sol.b() == doctest::Approx(omega * std::pow(ri, p.d) / (p.eps * p.eps)));
    CHECK(sol.e() == doctest::Approx(-omega * std::pow(ro, p.d) / (p.eps * p.eps)));

    const double d = 1e-9 * r;
    for (double s : {ri, r, ro}) {
      CHECK(std::abs(sol.u(s + d) - sol.u(s - d) - 2 * d * sol.du(s)) <= 1e-8);
      CHECK(std::abs(sol.du(s + d) - sol.du(s - d)) <= 1e-6);
    }
    // derivative closed form on (r_i, r) and finite differences elsewhere
    for (int k = 1; k < 1000; ++k) {
      const double s = ri + (ro - ri) * k / 1000.0;
      CHECK(sol.du(s) <= 1e-14);
      if (s < r) {
        const double formula = (std::pow(ri / s, p.d) - 1) * s / (p.d * p.eps * p.eps);
        CHECK(sol.du(s) == doctest::Approx(formula).epsilon(1e-10));
      }
      const double h = 1e-6 * r;
      const double fd = (sol.u(s + h) - sol.u(s - h)) / (2 * h);
      if (std::abs(s - r) > 2 * h) CHECK(sol.du(s) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      const double second = sol.u(s + 1e-4 * r) - 2 * sol.u(s) + sol.u(s - 1e-4 * r);
      if (s < r - 2e-4 * r) CHECK(second <= 1e-12);
      if (s > r + 2e-4 * r && s < ro - 2e-4 * r) CHECK(second >= -1e-12);
    }
    const double rn = new_radius(sol);
    CHECK(rn > ri);
    CHECK(rn < r);
    CHECK(std::abs(sol.u(rn)) < 1e-9);
  }
}

TEST_CASE("new radius moves quadratically in eps") {
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025, 0.0125};
  for (int d : {3, 10}) {
    const auto study = scaling_study(2.0, d, eps);
    REQUIRE(study.rows.size() == eps.size());
    REQUIRE(study.slope_rnew.has_value());
    CHECK(std::abs(*study.slope_rnew - 2.0) <= 0.15);
    std::vector<double> x, y;
    for (const auto& row : study.rows) {
      x.push_back(row.eps);
      y.push_back(row.r_minus_rnew);
    }
    // least-squares slope computed here, independently of the library helper
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) { mx += std::log(x[k]); my += std::log(y[k]); }
    mx /= x.size(); my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
      sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
    }
    CHECK(*study.slope_rnew == doctest::Approx(sxy / sxx).epsilon(1e-12));
  }
  // the inner and outer gaps are linear in eps at d = 3
  const auto d3 = scaling_study(2.0, 3, eps);
  CHECK(std::abs(*d3.slope_ri - 1.0) <= 0.1);
  CHECK(std::abs(*d3.slope_ro - 1.0) <= 0.1);
}

TEST_CASE("scaling study edge cases and CSV") {
  const auto empty = scaling_study(2.0, 3, {});
  CHECK(empty.rows.empty());
  CHECK_FALSE(empty.slope_rnew.has_value());

  const auto mixed = scaling_study(0.5, 10, {0.2, 0.05, 0.01});
  CHECK(mixed.rows.size() == 2);
  CHECK(mixed.skipped.size() == 1);

  const auto path = std::filesystem::temp_directory_path() / "acsplit_scaling.csv";
  write_scaling_csv(scaling_study(2.0, 3, {0.2, 0.1}), path, {"run=test"});
  std::ifstream is(path);
  std::string first, line, header;
  std::getline(is, first);
  CHECK(first == "# run=test");
  while (std::getline(is, line)) {
    if (line.rfind('#', 0) != 0) {
      header = line;
      break;
    }
  }
  CHECK(header == "eps,r_minus_ri,ro_minus_r,r_minus_rnew");
  std::getline(is, line);
  CHECK(line.rfind("0.20000000000000001,", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("profile comparison improves as eps shrinks") {
  const double d3_small = profile_comparison(RadialSolution({2.0, 0.05, 3}));
  const double d3_smaller = profile_comparison(RadialSolution({2.0, 0.0125, 3}));
  const double d10_large = profile_comparison(RadialSolution({2.0, 0.2, 10}));
  CHECK(d3_small < 0.1);
  CHECK(d3_smaller < d3_small);
  CHECK(d10_large > d3_small);
}
