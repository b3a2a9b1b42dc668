#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "acsplit/potentials.hpp"
#include "support.hpp"

using namespace acsplit;
using acsplit::testing::simpson;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

std::vector<PotentialSpec> all_kinds() {
  return {PotentialSpec::quadratic_wr(1.0), PotentialSpec::quadratic_wr(100.0),
          PotentialSpec::quadratic_bar(),   PotentialSpec::standard(),
          PotentialSpec::barrier_abs(),     PotentialSpec::barrier_quadratic(),
          PotentialSpec::ell_one(0.5)};
}

}  // namespace

TEST_CASE("standard potential values and split") {
  const auto s = PotentialSpec::standard();
  CHECK(w(s, 1.0) == 0.0);
  CHECK(w(s, 0.0) == 1.0);
  for (double u : {-1.3, -0.2, 0.7, 2.0}) {
    CHECK(w_vex_prime(s, u) == doctest::Approx(4 * u * u * u));
    CHECK(w_conc_prime(s, u) == doctest::Approx(-4 * u));
  }
}

TEST_CASE("W_R coefficients") {
  const auto c1 = wr_coefficients(1.0);
  CHECK(c1.beta == doctest::Approx(3.0));
  CHECK(c1.gamma == doctest::Approx(2 * kSqrt2));
  CHECK(std::abs(w(PotentialSpec::quadratic_wr(1.0), 1.0)) < 1e-14);
  CHECK(std::abs(w(PotentialSpec::quadratic_wr(1.0), -1.0)) < 1e-14);
  const double s = std::sqrt(101.0);
  CHECK(w(PotentialSpec::quadratic_wr(100.0), 0.0) == doctest::Approx((s - 1) * (s - 1) / 100).epsilon(1e-13));
  CHECK(w(PotentialSpec::quadratic_wr(100.0), 0.0) == doctest::Approx(1.02 - 0.02 * s).epsilon(1e-13));
  CHECK_THROWS_AS(wr_coefficients(0.0), DomainError);
  CHECK_THROWS_AS(wr_coefficients(-2.0), DomainError);

  const auto big = wr_coefficients(1e12);
  CHECK(big.beta == doctest::Approx(1.0).epsilon(1e-10));
  for (double u : {-0.9, -0.3, 0.0, 0.5, 1.0}) {
    CHECK(w(PotentialSpec::quadratic_wr(1e10), u) == doctest::Approx(u * u + 1 - 2 * std::abs(u)).epsilon(1e-4));
  }
}

TEST_CASE("W_R second derivative at the well") {
  for (double R : {1.0, 10.0, 100.0}) {
    const auto spec = PotentialSpec::quadratic_wr(R);
    CHECK(w_second(spec, 1.0) == doctest::Approx(2 * R / (R + 1)).epsilon(1e-12));
    const double h = 1e-4;
    const double fd = (w(spec, 1 + h) - 2 * w(spec, 1.0) + w(spec, 1 - h)) / (h * h);
    CHECK(w_second(spec, 1.0) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("evenness and split consistency") {
  for (const auto& spec : all_kinds()) {
    for (int k = 0; k <= 200; ++k) {
      const double u = -1.0 + k / 100.0;
      CHECK(std::abs(w(spec, u) - w(spec, -u)) <= 1e-12);
      const double whole = w(spec, u);
      if (std::isfinite(whole)) CHECK(std::abs(w_vex(spec, u) + w_conc(spec, u) - whole) <= 1e-12);
    }
  }
  CHECK(std::isinf(w(PotentialSpec::barrier_abs(), 1.01)));
  CHECK(w(PotentialSpec::ell_one(2.0), 1.5) == doctest::Approx(1.0));
}

TEST_CASE("quadratic kinds lie below the limit well and increase with R") {
  const std::vector<double> Rs{0.5, 1, 10, 100, 1e4};
  for (int k = 0; k <= 10000; ++k) {
    const double z = -1.0 + 2.0 * k / 10000.0;
    const double bound = (1 - std::abs(z)) * (1 - std::abs(z));
    double prev = -1.0;
    for (double R : Rs) {
      const double v = w(PotentialSpec::quadratic_wr(R), z);
      CHECK(v <= bound + 1e-12);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("optimal profiles") {
  for (const auto& spec : all_kinds()) CHECK(optimal_profile(spec, 0.0) == doctest::Approx(0.0));
  CHECK(optimal_profile(PotentialSpec::quadratic_bar(), 1 / kSqrt2) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(phi_bar(1 / kSqrt2) == doctest::Approx(0.632121).epsilon(1e-6));
  CHECK(optimal_profile(PotentialSpec::barrier_abs(), kSqrt2) == 1.0);
  CHECK(optimal_profile(PotentialSpec::barrier_abs(), -5.0) == -1.0);
  CHECK(optimal_profile(PotentialSpec::standard(), 0.3) == doctest::Approx(std::tanh(kSqrt2 * 0.3)));
  CHECK(phi_barrier_abs(0.5) == doctest::Approx(kSqrt2 * 0.5 - 0.125));
}

TEST_CASE("smooth W_R profile inverts the travel-time integral") {
  // x(phi) = int_0^phi dz / sqrt(2 W(z)) by Simpson, then phi(x(phi)) = phi.
  for (double R : {1.0, 100.0}) {
    const auto spec = PotentialSpec::quadratic_wr(R);
    for (double phi : {0.1, 0.4, 0.7, 0.9}) {
      const double x = simpson([&](double z) { return 1.0 / std::sqrt(2.0 * w(spec, z)); }, 0.0, phi);
      CHECK(optimal_profile(spec, x) == doctest::Approx(phi).epsilon(1e-9));
      CHECK(optimal_profile(spec, -x) == doctest::Approx(-phi).epsilon(1e-9));
    }
  }
}

TEST_CASE("profiles solve the first order ODE") {
  for (const auto& spec : {PotentialSpec::quadratic_bar(), PotentialSpec::standard(),
                           PotentialSpec::barrier_abs(), PotentialSpec::barrier_quadratic(),
                           PotentialSpec::quadratic_wr(100.0)}) {
    const double h = 1e-4;
    for (int k = 1; k < 100; ++k) {
      const double x = -1.0 + 2.0 * (k + 0.5) / 100.0;
      const double fd = (optimal_profile(spec, x + h) - optimal_profile(spec, x - h)) / (2 * h);
      const double rate = std::sqrt(2.0 * std::max(0.0, w(spec, optimal_profile(spec, x))));
      CHECK(fd == doctest::Approx(rate).epsilon(1e-6));
    }
  }
}

TEST_CASE("normalization constants against Simpson quadrature") {
  CHECK(normalization_constant(PotentialSpec::quadratic_bar()) == doctest::Approx(kSqrt2).epsilon(1e-10));
  CHECK(normalization_constant(PotentialSpec::standard()) == doctest::Approx(4 * kSqrt2 / 3).epsilon(1e-10));
  CHECK(normalization_constant(PotentialSpec::barrier_abs()) == doctest::Approx(4 * kSqrt2 / 3).epsilon(1e-9));
  CHECK(normalization_constant(PotentialSpec::barrier_quadratic()) ==
        doctest::Approx(std::numbers::pi / kSqrt2).epsilon(1e-8));
  const auto wr = PotentialSpec::quadratic_wr(100.0);
  const double ref = simpson([&](double z) { return std::sqrt(2.0 * std::max(0.0, w(wr, z))); }, -1.0, 1.0, 200000);
  CHECK(normalization_constant(wr) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("beta_min exact values and brackets") {
  CHECK(beta_min(2).value == doctest::Approx(1.0).epsilon(1e-10));
  const auto b4 = beta_min(4);
  CHECK(b4.value == doctest::Approx(1.0 / 3).epsilon(1e-10));
  CHECK(b4.argmin == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(((3.0 - 1) * (3 - 1) * (3 - 1) * (3 - 1) + 12 - 1) / 81 == doctest::Approx(1.0 / 3));
  for (double p : {2.0, 2.5, 3.0, 4.0, 6.0, 10.0}) {
    const double b = beta_min(p).value;
    CHECK(b >= std::pow(2.0, -p) - 1e-12);
    CHECK(b <= p * std::pow(2.0, 1 - p) + 1e-12);
    // brute-force grid minimum
    double grid_min = 1e300;
    for (int k = 0; k <= 200000; ++k) {
      const double z = 1.0 + 49.0 * k / 200000.0;
      grid_min = std::min(grid_min, (std::pow(z - 1, p) + p * z - 1) / std::pow(z, p));
    }
    CHECK(b == doctest::Approx(grid_min).epsilon(1e-6));
  }
  const double b6 = beta_min(6).value;
  CHECK(b6 >= 0.015625);
  CHECK(b6 <= 0.1875);
}

TEST_CASE("power law inequality") {
  CHECK(check_power_law(2, 0.3, -1.7));
  CHECK(check_power_law(4, 1.0, -3.0));
  // equality case for p = 4
  CHECK(std::pow(2.0, 4) == doctest::Approx(1 + 4 * (-3.0) + (1.0 / 3) * 81));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-10, 10);
  int failures = 0;
  for (int k = 0; k < 100000; ++k) failures += !check_power_law(4, dist(rng), dist(rng));
  CHECK(failures == 0);
  CHECK_FALSE(check_power_law(4, 1.0, 1.0, -3.0));
}

TEST_CASE("exact one dimensional first step") {
  CHECK(one_d_first_step(0.0, 0.1, 1.0) == 0.0);
  CHECK(one_d_first_step(0.1 / kSqrt2, 0.1, INFINITY) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-14));
  const double x = 0.05;
  const double scale = std::sqrt(1 + 0.005);
  CHECK(one_d_first_step(x, 0.1, 1.0) == doctest::Approx(phi_bar(scale * x / 0.1)).epsilon(1e-15));
  CHECK(std::abs(one_d_first_step(x, 0.1, 1.0) - one_d_first_step(x, 0.1, INFINITY)) < 1e-2);
}

TEST_CASE("potential ids parse and print") {
  for (const char* id : {"wr:R=100", "wr:R=inf", "standard", "barrier_abs", "barrier_quad", "elloneg:alpha=0.5"}) {
    CHECK(PotentialSpec::parse(id).id() == id);
  }
  CHECK(PotentialSpec::parse("wr:R=inf").kind() == PotentialKind::QuadraticWR);
  CHECK_THROWS_AS(PotentialSpec::parse("wr:R=-1"), DomainError);
  CHECK_THROWS_AS(PotentialSpec::parse("quartic"), DomainError);
}

TEST_CASE("curvature pairs") {
  CHECK(PotentialSpec::standard().curvature_pairs().size() == 2);
  CHECK(PotentialSpec::standard().curvature()->p == 2);
  CHECK(PotentialSpec::standard().curvature()->cbar == 2);
  CHECK(PotentialSpec::quadratic_wr(100).curvature()->cbar == 1);
}
