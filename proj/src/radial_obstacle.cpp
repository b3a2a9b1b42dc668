#include "acsplit/radial_obstacle.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "acsplit/diagnostics.hpp"
#include "acsplit/potentials.hpp"

namespace acsplit {

namespace {

template <class F>
double bisect(F&& f, double lo, double hi, double width) {
  double flo = f(lo);
  for (int k = 0; k < 400 && hi - lo > width; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void RadialProblem::validate() const {
  if (d == 2) throw DomainError("RadialProblem: d = 2 is not supported");
  if (d < 3) throw DomainError("RadialProblem: d must be >= 3");
  if (!(r > 0.0) || !(eps > 0.0)) throw DomainError("RadialProblem: r and eps must be > 0");
  if (!(2.0 * r * r - 4.0 * (d - 2) * eps * eps > r * r)) {
    throw DomainError("RadialProblem: need r > 2 eps sqrt(d - 2)");
  }
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double xi(double s, const RadialProblem& prob) {
  const double arg = 2.0 * prob.r * prob.r - 4.0 * (prob.d - 2) * prob.eps * prob.eps - s * s;
  if (!(s >= 0.0) || !(s <= prob.r) || arg < 0.0) throw DomainError("xi: argument out of domain");
  const double rd = std::pow(prob.r, prob.d);
  return std::sqrt(arg) - std::pow(2.0 * rd - std::pow(s, prob.d), 1.0 / prob.d);
}

Radii solve_radii(const RadialProblem& prob, double tol_rel) {
  prob.validate();
  auto f = [&](double s) { return xi(s, prob); };
  if (!(f(0.0) > 0.0) || !(f(prob.r) < 0.0)) {
    throw DomainError("solve_radii: xi does not change sign on [0, r]");
  }
  const double ri = bisect(f, 0.0, prob.r, tol_rel * prob.r);
  const double ro = std::pow(2.0 * std::pow(prob.r, prob.d) - std::pow(ri, prob.d), 1.0 / prob.d);
  return {ri, ro};
}

RadialSolution::RadialSolution(const RadialProblem& prob) : prob_(prob) {
  const Radii radii = solve_radii(prob);
  r_i_ = radii.r_i;
  r_o_ = radii.r_o;
  const double e2 = prob.eps * prob.eps;
  const double om = unit_ball_volume(prob.d);
  a_ = 1.0 + r_i_ * r_i_ / (2.0 * (prob.d - 2) * e2);
  c_ = -(1.0 + r_o_ * r_o_ / (2.0 * (prob.d - 2) * e2));
  b_ = om * std::pow(r_i_, prob.d) / e2;
  e_ = -om * std::pow(r_o_, prob.d) / e2;
}

double RadialSolution::u(double s) const {
  const int d = prob_.d;
  const double e2 = prob_.eps * prob_.eps;
  const double k = 1.0 / (d * (d - 2) * e2);
  if (s <= r_i_) return 1.0;
  if (s >= r_o_) return -1.0;
  const double g = std::pow(s, 2 - d);
  if (s <= prob_.r) return a_ - k * std::pow(r_i_, d) * g - s * s / (2.0 * d * e2);
  return c_ + k * std::pow(r_o_, d) * g + s * s / (2.0 * d * e2);
}

double RadialSolution::du(double s) const {
  const int d = prob_.d;
  const double e2 = prob_.eps * prob_.eps;
  if (s <= r_i_ || s >= r_o_) return 0.0;
  if (s <= prob_.r) return (std::pow(r_i_ / s, d) - 1.0) * s / (d * e2);
  return (1.0 - std::pow(r_o_ / s, d)) * s / (d * e2);
}

RadialSolution radial_solution(const RadialProblem& prob) { return RadialSolution(prob); }

double new_radius(const RadialSolution& sol, double tol_rel) {
  const double r = sol.problem().r;
  return bisect([&](double s) { return sol.u(s); }, sol.r_i(), r, tol_rel * r);
}

ScalingStudy scaling_study(double r, int d, const std::vector<double>& eps_list) {
  ScalingStudy out;
  for (double eps : eps_list) {
    try {
      const RadialSolution sol({r, eps, d});
      out.rows.push_back({eps, r - sol.r_i(), sol.r_o() - r, r - new_radius(sol)});
    } catch (const std::exception& ex) {
      out.skipped.push_back("eps=" + std::to_string(eps) + ": " + ex.what());
    }
  }
  if (out.rows.size() >= 2) {
    std::vector<double> x, a, b, c;
    for (const auto& row : out.rows) {
      x.push_back(row.eps);
      a.push_back(row.r_minus_ri);
      b.push_back(row.ro_minus_r);
      c.push_back(row.r_minus_rnew);
    }
    out.slope_ri = loglog_slope(x, a);
    out.slope_ro = loglog_slope(x, b);
    out.slope_rnew = loglog_slope(x, c);
  }
  return out;
}

void write_scaling_csv(const ScalingStudy& study, const std::filesystem::path& path,
                       const std::vector<std::string>& header) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_scaling_csv: cannot open " + path.string());
  for (const auto& line : header) os << "# " << line << '\n';
  os << std::setprecision(17);
  if (study.slope_ri) {
    os << "# slope_r_minus_ri=" << *study.slope_ri << '\n';
    os << "# slope_ro_minus_r=" << *study.slope_ro << '\n';
    os << "# slope_r_minus_rnew=" << *study.slope_rnew << '\n';
  }
  for (const auto& s : study.skipped) os << "# skipped " << s << '\n';
  os << "eps,r_minus_ri,ro_minus_r,r_minus_rnew\n";
  for (const auto& row : study.rows) {
    os << row.eps << ',' << row.r_minus_ri << ',' << row.ro_minus_r << ',' << row.r_minus_rnew
       << '\n';
  }
}

double profile_comparison(const RadialSolution& sol, int samples) {
  if (samples < 2) throw DomainError("profile_comparison: need >= 2 samples");
  const double eps = sol.problem().eps;
  const double rn = new_radius(sol);
  const double half = 2.0 * std::numbers::sqrt2 * eps;
  double dev = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double s = std::max(0.0, rn - half + 2.0 * half * k / (samples - 1));
    dev = std::max(dev, std::abs(sol.u(s) - phi_barrier_abs((rn - s) / eps)));
  }
  return dev;
}

}  // namespace acsplit
