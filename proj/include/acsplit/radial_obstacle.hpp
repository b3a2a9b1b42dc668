#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acsplit/errors.hpp"

namespace acsplit {

/// Radial double-obstacle step of a ball of radius r in R^d at tau = inf.
struct RadialProblem {
  double r;
  double eps;
  int d;

  /// DomainError unless r > 0, eps > 0, d >= 3 and r > 2 eps sqrt(d - 2).
  void validate() const;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// xi(s) = sqrt(2r^2 - 4(d-2)eps^2 - s^2) - (2r^d - s^d)^(1/d).
double xi(double s, const RadialProblem& prob);

struct Radii {
  double r_i;
  double r_o;
};

/// Bisection for the root of xi on [0, r] to width tol_rel * r.
Radii solve_radii(const RadialProblem& prob, double tol_rel = 1e-12);

class RadialSolution {
 public:
  explicit RadialSolution(const RadialProblem& prob);

  const RadialProblem& problem() const noexcept { return prob_; }
  double r_i() const noexcept { return r_i_; }
  double r_o() const noexcept { return r_o_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double e() const noexcept { return e_; }

  /// The four-branch profile u(s), s >= 0.
  double u(double s) const;
  double du(double s) const;

 private:
  RadialProblem prob_;
  double r_i_, r_o_, a_, b_, c_, e_;
};

RadialSolution radial_solution(const RadialProblem& prob);

/// Zero of u on (r_i, r), by bisection to width tol_rel * r.
double new_radius(const RadialSolution& sol, double tol_rel = 1e-12);

struct ScalingRow {
  double eps;
  double r_minus_ri;
  double ro_minus_r;
  double r_minus_rnew;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  std::vector<std::string> skipped;  ///< one message per rejected eps
  std::optional<double> slope_ri;
  std::optional<double> slope_ro;
  std::optional<double> slope_rnew;
};

ScalingStudy scaling_study(double r, int d, const std::vector<double>& eps_list);
/// `header` lines are written first, each prefixed with "# ".
void write_scaling_csv(const ScalingStudy& study, const std::filesystem::path& path,
                       const std::vector<std::string>& header = {});

/// max |u(s) - phi((r_new - s)/eps)| over [r_new - 2 sqrt2 eps, r_new + 2 sqrt2 eps],
/// phi the finite-segment profile of 1 - |u|.
double profile_comparison(const RadialSolution& sol, int samples = 2001);

}  // namespace acsplit
