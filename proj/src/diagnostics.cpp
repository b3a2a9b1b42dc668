#include "acsplit/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "acsplit/spectral.hpp"

namespace acsplit {

TimeStep::TimeStep(double tau) : tau_(tau) {
  if (std::isinf(tau) && tau > 0.0) {
    infinite_ = true;
  } else if (!(tau > 0.0)) {
    throw DomainError("TimeStep: tau must be > 0");
  }
}

TimeStep TimeStep::infinite() {
  TimeStep t;
  t.infinite_ = true;
  return t;
}

double TimeStep::value() const noexcept {
  return infinite_ ? std::numeric_limits<double>::infinity() : tau_;
}

std::string TimeStep::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << std::setprecision(17) << tau_;
  return os.str();
}

double mm_energy(const ScalarField& u, double eps, const PotentialSpec& spec) {
  if (!(eps > 0.0)) throw DomainError("mm_energy: eps must be > 0");
  const double h2 = u.grid().h() * u.grid().h();
  const bool clip = spec.kind() == PotentialKind::BarrierAbs ||
                    spec.kind() == PotentialKind::BarrierQuadratic;
  if (clip && u.max_abs() > 1.0 + 1e-6) {
    throw DomainError("mm_energy: barrier potential evaluated outside [-1, 1]");
  }
  double potential = 0.0;
  const auto& v = u.values();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    double x = v.data()[k];
    if (clip) x = std::clamp(x, -1.0, 1.0);
    potential += w(spec, x);
  }
  if (clip) {
    const FieldArray clipped = v.cwiseMax(-1.0).cwiseMin(1.0);
    const double g = h1_seminorm(ScalarField(u.grid(), clipped));
    return 0.5 * eps * g * g + h2 * potential / eps;
  }
  const double g = h1_seminorm(u);
  return 0.5 * eps * g * g + h2 * potential / eps;
}

DissipationCheck dissipation_check(const ScalarField& u0, const ScalarField& u1, double eps,
                                   TimeStep tau, const PotentialSpec& spec, CurvaturePair pair) {
  check_same_grid(u0, u1, "dissipation_check");
  const ScalarField d(u0.grid(), u1.values() - u0.values());
  const double g = h1_seminorm(d);
  const double l2 = lp_norm(d, 2.0);
  const double lp = lp_norm(d, pair.p);
  const double lhs = 0.5 * eps * g * g + eps * tau.inverse() * l2 * l2 +
                     pair.cbar / eps * std::pow(lp, pair.p);
  const double rhs = mm_energy(u0, eps, spec) - mm_energy(u1, eps, spec);
  return {lhs, rhs, lhs <= rhs + 1e-6};
}

DissipationCheck dissipation_check(const ScalarField& u0, const ScalarField& u1, double eps,
                                   TimeStep tau, const PotentialSpec& spec) {
  const auto pair = spec.curvature();
  if (!pair) throw DomainError("dissipation_check: " + spec.id() + " has no curvature constants");
  return dissipation_check(u0, u1, eps, tau, spec, *pair);
}

double drift_bound(double e0, int n_steps, double eps, double p) {
  if (!(e0 >= 0.0)) throw DomainError("drift_bound: e0 must be >= 0");
  if (n_steps < 0) throw DomainError("drift_bound: n_steps must be >= 0");
  if (!(p >= 2.0)) throw DomainError("drift_bound: p must be >= 2");
  if (n_steps == 0) return 0.0;
  if (p == 2.0) return std::sqrt(2.0 * n_steps * eps * e0);
  return std::pow(e0, 1.0 / p) * std::pow(n_steps * std::pow(eps, 1.0 / (p - 1.0)), 1.0 - 1.0 / p);
}

std::optional<double> interface_radius(const ScalarField& u) {
  const auto count = (u.values() > 0.0).count();
  if (count == 0) return std::nullopt;
  const double h = u.grid().h();
  return std::sqrt(h * h * static_cast<double>(count) / std::numbers::pi);
}

bool EnergyTrace::energy_monotone(double rel_tol) const {
  double prev = initial_energy;
  for (const auto& r : records) {
    if (r.energy > prev + rel_tol * (1.0 + std::abs(prev))) return false;
    prev = r.energy;
  }
  return true;
}

void write_trace_csv(const EnergyTrace& trace, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trace_csv: cannot open " + path.string());
  os << "# format=acsplit-trace-1\n";
  for (const auto& [k, v] : trace.metadata) os << "# " << k << '=' << v << '\n';
  os << std::setprecision(17);
  os << "# initial_energy=" << trace.initial_energy << '\n';
  if (trace.initial_radius) os << "# initial_radius=" << *trace.initial_radius << '\n';
  if (trace.failed) os << "# failed=" << trace.failure << '\n';
  os << "step,energy,radius,l2_move,lp_move,h1_move,inner_iters\n";
  for (const auto& r : trace.records) {
    os << r.step << ',' << r.energy << ',';
    if (r.radius) os << *r.radius;
    os << ',' << r.l2_move << ',' << r.lp_move << ',' << r.h1_move << ',' << r.inner_iterations
       << '\n';
  }
}

EnergyTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_trace_csv: cannot open " + path.string());
  EnergyTrace trace;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "initial_energy") trace.initial_energy = std::stod(value);
      else if (key == "initial_radius") trace.initial_radius = std::stod(value);
      else if (key == "failed") { trace.failed = true; trace.failure = value; }
      else if (key != "format") trace.metadata[key] = value;
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() == 6) cols.emplace_back();
    if (cols.size() != 7) throw std::runtime_error("read_trace_csv: malformed row '" + line + "'");
    StepRecord r;
    r.step = std::stoi(cols[0]);
    r.energy = std::stod(cols[1]);
    if (!cols[2].empty()) r.radius = std::stod(cols[2]);
    r.l2_move = std::stod(cols[3]);
    r.lp_move = std::stod(cols[4]);
    r.h1_move = std::stod(cols[5]);
    r.inner_iterations = std::stoi(cols[6]);
    trace.records.push_back(r);
  }
  return trace;
}

FitResult fit_effective_step(std::span<const int> steps, std::span<const double> radii, double eps,
                             double min_radius) {
  if (steps.size() != radii.size()) throw DomainError("fit_effective_step: size mismatch");
  double sk = 0, sy = 0, skk = 0, sky = 0;
  int m = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(radii[i] >= min_radius)) continue;
    const double k = steps[i];
    const double y = radii[i] * radii[i];
    sk += k; sy += y; skk += k * k; sky += k * y;
    ++m;
  }
  if (m < 10) throw DomainError("fit_effective_step: fewer than 10 usable radius samples");
  const double denom = m * skk - sk * sk;
  const double slope = (m * sky - sk * sy) / denom;
  const double intercept = (sy - slope * sk) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(radii[i] >= min_radius)) continue;
    const double e = radii[i] * radii[i] - (intercept + slope * steps[i]);
    ss += e * e;
  }
  return {-slope / (2.0 * eps * eps), std::sqrt(ss / m), m};
}

FitResult fit_effective_step(const EnergyTrace& trace, double eps) {
  std::vector<int> steps;
  std::vector<double> radii;
  for (const auto& r : trace.records) {
    if (!r.radius) continue;
    steps.push_back(r.step);
    radii.push_back(*r.radius);
  }
  double min_radius = 0.0;
  if (auto it = trace.metadata.find("n"); it != trace.metadata.end()) {
    double length = 1.0;
    if (auto l = trace.metadata.find("length"); l != trace.metadata.end()) length = std::stod(l->second);
    min_radius = 5.0 * length / std::stod(it->second);
  }
  return fit_effective_step(steps, radii, eps, min_radius);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace acsplit
