#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acsplit/diagnostics.hpp"
#include "acsplit/experiments.hpp"
#include "acsplit/potentials.hpp"
#include "acsplit/radial_obstacle.hpp"
#include "acsplit/stepper.hpp"
#include "acsplit/svg.hpp"
#include "acsplit/thresholding.hpp"
#include "acsplit/verify.hpp"
#include "cli_config.hpp"

namespace fs = std::filesystem;
using namespace acsplit;
using cli::Config;
using cli::UsageError;

namespace {

enum Exit { kOk = 0, kUsage = 1, kRunFailure = 2, kVerifyFailure = 3 };

struct Common {
  std::string config_path;
  std::string out = "out";
  int threads = 1;
  std::uint64_t seed = 20240611;
};

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Lines embedded at the top of every output file.
std::vector<std::string> provenance(const Config& cfg, const Common& common) {
  std::vector<std::string> h{std::string("cli_format=") + cli::kFormatVersion,
                             "command=" + cfg.command()};
  for (const auto& kv : cfg.echo()) h.push_back("config." + kv);
  h.push_back("seed=" + std::to_string(common.seed));
  return h;
}

std::ofstream open_output(const fs::path& path, const std::vector<std::string>& header) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os.precision(17);
  for (const auto& line : header) os << "# " << line << '\n';
  return os;
}

PlotSpec plot_spec(std::string title, std::string xlabel, std::string ylabel,
                   const std::vector<std::string>& notes, bool log_x = false, bool log_y = false) {
  PlotSpec p;
  p.title = std::move(title);
  p.xlabel = std::move(xlabel);
  p.ylabel = std::move(ylabel);
  p.log_x = log_x;
  p.log_y = log_y;
  p.notes = notes;
  return p;
}

fs::path output_dir(const Common& common) {
  fs::path dir(common.out);
  fs::create_directories(dir);
  return dir;
}

/// Runs config validation; precondition violations become usage errors.
template <class F>
void validate(F&& f) {
  try {
    f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::pair<std::string, std::string>> with_solver_keys(
    std::vector<std::pair<std::string, std::string>> keys) {
  const NewtonOptions nw;
  const AdmmOptions ad;
  keys.insert(keys.end(), {{"newton_tol", num(nw.tol)},
                           {"newton_max_iter", std::to_string(nw.max_iter)},
                           {"cg_max_iter", std::to_string(nw.cg_max_iter)},
                           {"admm_rho", num(ad.rho)},
                           {"admm_max_iter", std::to_string(ad.max_iter)},
                           {"admm_tol", num(ad.primal_tol)}});
  return keys;
}

void read_solver_keys(const Config& cfg, StepperConfig& sc) {
  sc.newton.tol = cfg.positive("newton_tol");
  sc.newton.max_iter = cfg.integer("newton_max_iter", 1);
  sc.newton.cg_max_iter = cfg.integer("cg_max_iter", 1);
  sc.admm.rho = cfg.positive("admm_rho");
  sc.admm.max_iter = cfg.integer("admm_max_iter", 1);
  sc.admm.primal_tol = sc.admm.dual_tol = cfg.positive("admm_tol");
}

StepperConfig stepper_config(const Config& cfg, TimeStep tau, double eps) {
  StepperConfig sc{GridSpec(cfg.integer("n", 4), cfg.positive("length")),
                   PotentialSpec::parse(cfg.text("potential")), eps, tau};
  read_solver_keys(cfg, sc);
  sc.validate();
  return sc;
}

double checked_r0(const Config& cfg) {
  const double r0 = cfg.positive("r0");
  if (r0 >= 0.5 * cfg.positive("length")) throw UsageError("r0: circle must fit in the box");
  return r0;
}

// ---------------------------------------------------------------------------

Config simulate_config() {
  return Config("simulate", with_solver_keys({{"potential", "wr:R=100"},
                                              {"n", "128"},
                                              {"length", "1"},
                                              {"eps", "0.1"},
                                              {"tau", "100"},
                                              {"steps", "200"},
                                              {"r0", "0.4"},
                                              {"c_eff_ref", "auto"}}));
}

int cmd_simulate(const Config& cfg, const Common& common) {
  std::optional<StepperConfig> sc;
  double r0 = 0, c_ref = 0;
  int steps = 0;
  validate([&] {
    sc = stepper_config(cfg, cfg.step("tau"), cfg.positive("eps"));
    r0 = checked_r0(cfg);
    steps = cfg.integer("steps", 0);
    c_ref = cfg.text("c_eff_ref") == "auto" ? reference_c_eff(sc->potential)
                                            : cfg.positive("c_eff_ref");
  });
  const fs::path dir = output_dir(common);
  const auto header = provenance(cfg, common);
  const double half = 0.5 * sc->grid.length();

  RunResult res = run(circle_indicator(sc->grid, r0, half, half), *sc, steps);
  for (const auto& line : header) {
    const auto eq = line.find('=');
    res.trace.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }
  res.trace.metadata["r0"] = num(r0);
  res.trace.metadata["steps"] = std::to_string(steps);
  write_trace_csv(res.trace, dir / "trace.csv");
  write_binary(res.final_field, dir / "final_field.bin");
  {
    auto os = open_output(dir / "final_field.txt", header);
    os << "file=final_field.bin\nencoding=ACSF u32 n, u64 reserved, n*n f64 little-endian row-major\n";
    os << "n=" << sc->grid.n() << "\nlength=" << num(sc->grid.length()) << '\n';
  }

  const double cw = normalization_constant(sc->potential);
  const double dt = c_ref * sc->eps * sc->eps;
  Series energy{"E/c_W", {0.0}, {res.trace.initial_energy / cw}};
  for (const auto& r : res.trace.records) {
    energy.x.push_back(r.step * dt);
    energy.y.push_back(r.energy / cw);
  }
  Series perimeter{"2 pi sqrt(r0^2 - 2t)", {}, {}, true};
  const double t_end = std::min(0.5 * r0 * r0, std::max(steps, 1) * dt);
  for (int k = 0; k <= 200; ++k) {
    const double t = t_end * k / 200.0;
    perimeter.x.push_back(t);
    perimeter.y.push_back(2.0 * std::numbers::pi * std::sqrt(std::max(0.0, r0 * r0 - 2.0 * t)));
  }
  write_line_plot(dir / "energy.svg",
                  plot_spec("normalized energy, " + sc->potential.id() + ", tau=" + sc->tau.str(),
                            "t = k c_eff eps^2 (c_eff=" + num(c_ref) + ")", "E / c_W", header),
                  {energy, perimeter});

  std::cout << "steps_completed=" << res.trace.records.size() << '\n';
  std::cout << "initial_energy=" << num(res.trace.initial_energy) << '\n';
  if (!res.trace.records.empty()) {
    std::cout << "final_energy=" << num(res.trace.records.back().energy) << '\n';
    std::cout << "energy_monotone=" << (res.trace.energy_monotone() ? 1 : 0) << '\n';
    try {
      const FitResult fit = fit_effective_step(res.trace, sc->eps);
      std::cout << "c_eff_fit=" << num(fit.c_eff) << " points=" << fit.n_points << '\n';
    } catch (const DomainError&) {
      std::cout << "c_eff_fit=unavailable\n";
    }
  }
  if (res.trace.failed) {
    std::cerr << "simulate: run failed at " << res.trace.failure << '\n';
    return kRunFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

Config sweep_config() {
  return Config("sweep-tau", with_solver_keys({{"potential", "wr:R=100"},
                                               {"n", "128"},
                                               {"length", "1"},
                                               {"eps", "0.1,0.05"},
                                               {"taus", "0.001,0.01,0.1,1,10,100,inf"},
                                               {"r0", "0.4"},
                                               {"level", num(2.0 * std::numbers::pi * 0.3)},
                                               {"cap", "5000"}}));
}

int cmd_sweep_tau(const Config& cfg, const Common& common) {
  std::vector<double> eps_list;
  std::vector<TimeStep> taus;
  std::vector<StepperConfig> bases;
  double r0 = 0, level = 0;
  int cap = 0;
  validate([&] {
    eps_list = cfg.positives("eps");
    taus = cfg.steps("taus");
    for (double eps : eps_list) {
      for (const auto& tau : taus) stepper_config(cfg, tau, eps);
      bases.push_back(stepper_config(cfg, taus.front(), eps));
    }
    r0 = checked_r0(cfg);
    level = cfg.positive("level");
    cap = cfg.integer("cap", 1);
  });
  const fs::path dir = output_dir(common);
  const auto header = provenance(cfg, common);
  const double cw = normalization_constant(bases.front().potential);

  double largest = 0.0;
  for (const auto& t : taus) {
    if (!t.is_infinite()) largest = std::max(largest, t.value());
  }
  const double inf_x = largest > 0.0 ? 10.0 * largest : 1.0;

  auto os = open_output(dir / "sweep_tau.csv", header);
  os << "eps,tau,iterations_to_level,reached\n";
  std::vector<Series> series;
  int unreached = 0;
  for (const auto& base : bases) {
    const double half = 0.5 * base.grid.length();
    const auto points = sweep_tau(base, circle_indicator(base.grid, r0, half, half), taus,
                                  level * cw, cap, common.threads);
    Series s{"eps=" + num(base.eps), {}, {}};
    for (const auto& p : points) {
      os << num(base.eps) << ',' << p.tau.str() << ',' << p.iterations << ',' << (p.reached ? 1 : 0)
         << '\n';
      s.x.push_back(p.tau.is_infinite() ? inf_x : p.tau.value());
      s.y.push_back(p.iterations);
      if (!p.reached) {
        ++unreached;
        std::cerr << "sweep-tau: eps=" << num(base.eps) << " tau=" << p.tau.str()
                  << " did not reach the level within cap=" << cap << '\n';
      }
    }
    series.push_back(std::move(s));
  }
  write_line_plot(dir / "sweep_tau.svg",
                  plot_spec("iterations until E/c_W <= " + num(level),
                            "tau (inf drawn at " + num(inf_x) + ")", "iterations", header, true),
                  series);
  std::cout << "rows=" << taus.size() * bases.size() << " unreached=" << unreached << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

Config mbo_config() {
  return Config("mbo", {{"n", "128"},
                        {"length", "1"},
                        {"eps", "0.05"},
                        {"steps", "20"},
                        {"init", "circle"},
                        {"r0", "0.4"},
                        {"c_eff_ref", "0.25"}});
}

int cmd_mbo(const Config& cfg, const Common& common) {
  std::optional<GridSpec> grid;
  double eps = 0, r0 = 0, c_ref = 0;
  int steps = 0;
  bool circle = true;
  validate([&] {
    grid.emplace(cfg.integer("n", 4), cfg.positive("length"));
    eps = cfg.positive("eps");
    steps = cfg.integer("steps", 0);
    c_ref = cfg.positive("c_eff_ref");
    const auto& init = cfg.text("init");
    if (init != "circle" && init != "random") throw UsageError("init: expected circle or random");
    circle = init == "circle";
    r0 = checked_r0(cfg);
  });
  const fs::path dir = output_dir(common);
  const auto header = provenance(cfg, common);

  ScalarField u0(*grid);
  if (circle) {
    u0 = circle_indicator(*grid, r0, 0.5 * grid->length(), 0.5 * grid->length());
  } else {
    std::mt19937_64 rng(common.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < grid->n(); ++i) {
      for (int j = 0; j < grid->n(); ++j) u0(i, j) = dist(rng);
    }
  }
  const MboRun res = mbo_run(u0, eps, steps);

  auto os = open_output(dir / "mbo.csv", header);
  os << "step,eo_energy,radius,mcf_radius\n";
  Series radius{"radius", {}, {}}, mcf{"sqrt(r0^2 - 2 c_eff k eps^2)", {}, {}, true};
  Series energy{"EO energy", {}, {}};
  bool monotone = true;
  for (int k = 0; k <= steps; ++k) {
    const double e = res.eo_energies[k];
    if (k > 0 && e > res.eo_energies[k - 1] * (1.0 + 1e-12) + 1e-14) monotone = false;
    os << k << ',' << e << ',';
    if (res.radii[k]) os << *res.radii[k];
    os << ',';
    const double r2 = r0 * r0 - 2.0 * c_ref * k * eps * eps;
    if (circle && r2 >= 0.0) {
      os << std::sqrt(r2);
      mcf.x.push_back(k);
      mcf.y.push_back(std::sqrt(r2));
    }
    os << '\n';
    if (res.radii[k]) {
      radius.x.push_back(k);
      radius.y.push_back(*res.radii[k]);
    }
    energy.x.push_back(k);
    energy.y.push_back(e);
  }
  write_line_plot(dir / "mbo_radius.svg",
                  plot_spec("thresholding radius, eps=" + num(eps), "step k", "radius", header),
                  circle ? std::vector<Series>{radius, mcf} : std::vector<Series>{radius});
  write_line_plot(dir / "mbo_energy.svg",
                  plot_spec("thresholding EO energy, eps=" + num(eps), "step k", "EO energy", header),
                  {energy});
  std::cout << "eo_energy_monotone=" << (monotone ? 1 : 0) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

Config obstacle_config() {
  return Config("obstacle", {{"r", "2"}, {"d", "3"}, {"eps", "0.2"}, {"samples", "2001"}});
}

int cmd_obstacle(const Config& cfg, const Common& common) {
  double r = 0;
  int d = 0, samples = 0;
  std::vector<double> eps_list;
  validate([&] {
    r = cfg.positive("r");
    d = cfg.integer("d", 3);
    samples = cfg.integer("samples", 2);
    eps_list = cfg.positives("eps");
    if (eps_list.size() == 1) RadialProblem{r, eps_list.front(), d}.validate();
  });
  const fs::path dir = output_dir(common);
  const auto header = provenance(cfg, common);

  if (eps_list.size() == 1) {
    const RadialSolution sol(RadialProblem{r, eps_list.front(), d});
    const double eps = eps_list.front();
    const double rn = new_radius(sol);
    auto h = header;
    for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{
             {"r_i", sol.r_i()}, {"r_o", sol.r_o()}, {"r_new", rn}, {"a", sol.a()},
             {"b", sol.b()}, {"c", sol.c()}, {"e", sol.e()},
             {"profile_max_deviation", profile_comparison(sol)}}) {
      h.push_back(k + "=" + num(v));
    }
    auto os = open_output(dir / "obstacle_profile.csv", h);
    os << "s,u,du,profile\n";
    Series u{"u(s)", {}, {}}, prof{"phi((r_new - s)/eps)", {}, {}, true};
    const double s_max = 1.5 * r;
    for (int k = 0; k < samples; ++k) {
      const double s = s_max * k / (samples - 1);
      const double p = phi_barrier_abs((rn - s) / eps);
      os << s << ',' << sol.u(s) << ',' << sol.du(s) << ',' << p << '\n';
      u.x.push_back(s);
      u.y.push_back(sol.u(s));
      prof.x.push_back(s);
      prof.y.push_back(p);
    }
    write_line_plot(dir / "obstacle_profile.svg",
                    plot_spec("radial obstacle step, d=" + std::to_string(d) + ", eps=" + num(eps),
                              "s", "u", h),
                    {u, prof});
    std::cout << "r_i=" << num(sol.r_i()) << " r_o=" << num(sol.r_o()) << " r_new=" << num(rn) << '\n';
    return kOk;
  }

  const ScalingStudy study = scaling_study(r, d, eps_list);
  for (const auto& s : study.skipped) std::cerr << "obstacle: skipped " << s << '\n';
  if (study.rows.empty()) throw UsageError("obstacle: no admissible eps in the list");
  write_scaling_csv(study, dir / "obstacle_scaling.csv", header);
  Series ri{"r - r_i", {}, {}}, ro{"r_o - r", {}, {}}, rn{"r - r_new", {}, {}};
  Series lin{"eps", {}, {}, true}, quad{"eps^2/2", {}, {}, true};
  for (const auto& row : study.rows) {
    for (Series* s : {&ri, &ro, &rn, &lin, &quad}) s->x.push_back(row.eps);
    ri.y.push_back(row.r_minus_ri);
    ro.y.push_back(row.ro_minus_r);
    rn.y.push_back(row.r_minus_rnew);
    lin.y.push_back(row.eps);
    quad.y.push_back(0.5 * row.eps * row.eps);
  }
  write_line_plot(dir / "obstacle_scaling.svg",
                  plot_spec("radial obstacle scaling, d=" + std::to_string(d), "eps", "distance",
                            header, true, true),
                  {ri, ro, rn, lin, quad});
  if (study.slope_ri) {
    std::cout << "slope_r_minus_ri=" << num(*study.slope_ri)
              << " slope_ro_minus_r=" << num(*study.slope_ro)
              << " slope_r_minus_rnew=" << num(*study.slope_rnew) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

Config verify_config() { return Config("verify", {{"criteria", "1,2,3,4,5,6,7,8,9"}}); }

int cmd_verify(const Config& cfg, const Common& common) {
  std::vector<int> criteria;
  validate([&] {
    for (const auto& w : cfg.words("criteria")) {
      const double v = cli::parse_real(w, "criteria");
      if (v != std::floor(v) || v < 1 || v > kCriteria) {
        throw UsageError("criteria: expected integers in 1.." + std::to_string(kCriteria));
      }
      criteria.push_back(static_cast<int>(v));
    }
  });
  const fs::path dir = output_dir(common);
  VerifyOptions opts;
  opts.threads = common.threads;
  opts.seed = common.seed;
  const auto checks = verify_all(opts, criteria);

  auto os = open_output(dir / "verify.txt", provenance(cfg, common));
  os << "id status measured expected tolerance\n";
  bool all = true;
  for (const auto& c : checks) {
    const std::string line = format_check(c);
    std::cout << line << '\n';
    os << line << '\n';
    all = all && c.pass;
  }
  for (int k : criteria) {
    bool ok = true;
    for (const auto& c : checks) {
      if (c.criterion == k) ok = ok && c.pass;
    }
    const std::string line = "criterion " + std::to_string(k) + (ok ? " PASS" : " FAIL");
    std::cout << line << '\n';
    os << "# " << line << '\n';
  }
  return all ? kOk : kVerifyFailure;
}

// ---------------------------------------------------------------------------

Config profile_config() {
  return Config("profile", {{"potentials", "wr:R=100,wr:R=inf,standard,barrier_abs,barrier_quad"},
                            {"xmax", "4"},
                            {"umax", "1.2"},
                            {"samples", "401"}});
}

int cmd_profile(const Config& cfg, const Common& common) {
  std::vector<PotentialSpec> specs;
  double xmax = 0, umax = 0;
  int samples = 0;
  validate([&] {
    for (const auto& w : cfg.words("potentials")) specs.push_back(PotentialSpec::parse(w));
    xmax = cfg.positive("xmax");
    umax = cfg.positive("umax");
    samples = cfg.integer("samples", 2);
  });
  const fs::path dir = output_dir(common);
  auto header = provenance(cfg, common);
  for (const auto& s : specs) header.push_back("c_W[" + s.id() + "]=" + num(normalization_constant(s)));

  auto grid = [&](double lim, int k) { return -lim + 2.0 * lim * k / (samples - 1); };
  std::vector<Series> profiles, potentials;
  {
    auto os = open_output(dir / "profiles.csv", header);
    os << 'x';
    for (const auto& s : specs) os << ",phi[" << s.id() << "],dphi[" << s.id() << ']';
    os << '\n';
    for (const auto& s : specs) profiles.push_back({s.id(), {}, {}});
    for (int k = 0; k < samples; ++k) {
      const double x = grid(xmax, k);
      os << x;
      for (std::size_t m = 0; m < specs.size(); ++m) {
        const double p = optimal_profile(specs[m], x);
        os << ',' << p << ',' << optimal_profile_derivative(specs[m], x);
        profiles[m].x.push_back(x);
        profiles[m].y.push_back(p);
      }
      os << '\n';
    }
  }
  {
    auto os = open_output(dir / "potentials.csv", header);
    os << 'u';
    for (const auto& s : specs) os << ",W[" << s.id() << ']';
    os << '\n';
    for (const auto& s : specs) potentials.push_back({s.id(), {}, {}});
    for (int k = 0; k < samples; ++k) {
      const double u = grid(umax, k);
      os << u;
      for (std::size_t m = 0; m < specs.size(); ++m) {
        const double v = w(specs[m], u);
        if (std::isinf(v)) {
          os << ",inf";
        } else {
          os << ',' << v;
        }
        potentials[m].x.push_back(u);
        potentials[m].y.push_back(v);
      }
      os << '\n';
    }
  }
  write_line_plot(dir / "profiles.svg", plot_spec("optimal profiles", "x", "phi(x)", header),
                  profiles);
  write_line_plot(dir / "potentials.svg", plot_spec("potentials", "u", "W(u)", header), potentials);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex-concave splitting Allen-Cahn experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "key=value config file (arguments override it)");
  app.add_option("--out", common.out, "output directory")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads for sweeps and verify")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", common.seed, "seed for random initial data and property checks")
      ->capture_default_str();

  struct Entry {
    Config (*make)();
    int (*run)(const Config&, const Common&);
    const char* help;
  };
  std::vector<Entry> entries{
      {simulate_config, cmd_simulate, "circle run: trace CSV, final field, energy SVG"},
      {sweep_config, cmd_sweep_tau, "iterations until an energy level vs tau"},
      {mbo_config, cmd_mbo, "resolvent thresholding run"},
      {obstacle_config, cmd_obstacle, "radial double-obstacle step or eps scaling study"},
      {verify_config, cmd_verify, "acceptance checks, one line per check"},
      {profile_config, cmd_profile, "optimal profiles and potentials as CSV"}};
  std::vector<CLI::App*> subs;
  std::vector<std::vector<std::string>> args(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Config defaults = entries[k].make();
    std::string keys;
    for (const auto& kv : defaults.echo()) keys += "\n  " + kv;
    subs.push_back(app.add_subcommand(defaults.command(),
                                      std::string(entries[k].help) + "\nkeys (defaults):" + keys));
    subs.back()->add_option("settings", args[k], "key=value overrides");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    try {
      Config cfg = entries[k].make();
      if (!common.config_path.empty()) cfg.merge_file(common.config_path);
      cfg.merge_args(args[k]);
      return entries[k].run(cfg, common);
    } catch (const UsageError& err) {
      std::cerr << "usage error: " << err.what() << '\n';
      return kUsage;
    } catch (const std::exception& err) {
      std::cerr << "run failure: " << err.what() << '\n';
      return kRunFailure;
    }
  }
  return kUsage;
}
