#include "msrelax/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "msrelax/analysis.hpp"
#include "msrelax/config.hpp"
#include "msrelax/curve_io.hpp"
#include "msrelax/elliptic.hpp"
#include "msrelax/error.hpp"
#include "msrelax/evolution.hpp"
#include "msrelax/potential.hpp"
#include "msrelax/sobolev.hpp"
#include "msrelax/squared_distance.hpp"
#include "msrelax/trajectory.hpp"

namespace msrelax::cli {
namespace {

using nlohmann::json;
constexpr double kPi = 3.14159265358979323846;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Standard asymmetric run used by the trajectory suites when no log is given.
RunConfig standard_run() {
  RunConfig c;
  c.N = 64;
  c.modes = {2, 3};
  c.amps = {0.01, 0.008};
  c.phases = {0.0, 1.0};
  c.t_end = 0.3;
  c.k_H = 10;
  c.grid = 512;
  return c;
}

TrajectoryLog trajectory_for(const std::string& path) {
  if (!path.empty()) return trajectory::load(path);
  evolution::RunHooks hooks;
  hooks.write_files = false;
  return evolution::run(standard_run(), hooks).log;
}

json suite_fuglede(long n, std::uint64_t seed) {
  const auto s = analysis::fuglede_suite(n, seed, 0.05, worker_count());
  return {{"pass", s.passed == s.trials},
          {"trials", s.trials},
          {"passed", s.passed},
          {"hypothesis_failures", s.hypothesis_failures},
          {"max_deficit_over_upper", s.max_deficit_over_upper},
          {"min_deficit_over_lower", s.min_deficit_over_lower}};
}

json suite_eed(const TrajectoryLog& log) {
  const auto r = analysis::check_eed(log);
  return {{"pass", r.pass()},
          {"rows", r.rows_checked},
          {"max_E_over_R3D", r.max_E_over_R3D},
          {"last_E_over_R3D", r.last_E_over_R3D},
          {"max_E_over_sqrtHD", r.max_E_over_sqrtHD},
          {"E2D_monotone", r.monotone},
          {"worst_E2D_increase", r.worst_increase}};
}

json suite_diff(const TrajectoryLog& log) {
  const auto r = analysis::check_differential(log);
  return {{"pass", r.pass()},
          {"intervals", r.intervals},
          {"max_balance_error", r.max_balance_error},
          {"tolerance", r.tolerance},
          {"max_dH_over_sqrtHD", r.max_dH_ratio},
          {"max_dD_ratio", r.max_dD_ratio},
          {"dD_positive_intervals", r.dD_positive}};
}

json window_json(const analysis::Window& w, const TrajectoryLog& log) {
  if (w.size() == 0) return nullptr;
  return {{"t_begin", log.rows[w.begin].t}, {"t_end", log.rows[w.end - 1].t}, {"rows", w.size()},
          {"slope", w.slope}, {"r2", w.r2}};
}

json suite_regime(const TrajectoryLog& log) {
  const auto f = analysis::regime_fit(log);
  json j = {{"pass", true},
            {"monitor", true},
            {"has_algebraic", f.has_algebraic},
            {"has_exponential", f.has_exponential},
            {"alg_slope", f.alg_slope},
            {"exp_rate", f.exp_rate},
            {"T1", f.T1},
            {"T1_over_R3", f.T1_over_R3},
            {"note", f.note}};
  j["algebraic"] = f.has_algebraic ? window_json(f.algebraic, log) : json(nullptr);
  j["exponential"] = f.has_exponential ? window_json(f.exponential, log) : json(nullptr);
  return j;
}

json suite_bary(const TrajectoryLog& log) {
  const auto r = analysis::barycenter_monitor(log);
  return {{"pass", true},
          {"monitor", true},
          {"within_cap", r.pass()},
          {"max_ratio", r.max_ratio},
          {"cap", r.cap},
          {"max_velocity_ratio", r.max_velocity_ratio}};
}

json suite_embed() {
  json rows = json::array();
  for (int k = 2; k <= 6; ++k) {
    // equal curvature oscillation across modes, inside the kappa_l1 <= 1/5 hypothesis
    const double eps = 0.03 / (k * k - 1);
    const auto curve = geometry::project_area(geometry::from_function(
        [k, eps](double p) { return 1.0 + eps * std::cos(k * p); }, 1.0, 64));
    const auto cache = geometry::build_cache(curve);
    const auto solve = potential::solve_ms(cache, potential::Kernel::plane());
    const auto r = analysis::check_improved_embedding(cache, solve);
    rows.push_back({{"k", k}, {"ratio", r.ratio}, {"kappa_l1", r.kappa_l1}, {"bound", r.bound},
                    {"hypothesis", r.hypothesis}, {"within_bound", r.pass}, {"boundary_control_ratio", analysis::boundary_control_ratio(cache)}});
  }
  return {{"pass", true}, {"monitor", true}, {"modes", rows}};
}

json suite_sobolev(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  long violations = 0;
  double worst = 0.0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    std::vector<double> f(128, 0.0);
    const auto x = spectral::nodes(128);
    for (int k = 1; k < 20; ++k) {
      const double a = normal(rng) / (k * k), b = normal(rng) / (k * k);
      for (std::size_t j = 0; j < f.size(); ++j) f[j] += a * std::cos(k * x[j]) + b * std::sin(k * x[j]);
    }
    const auto s = sobolev::from_samples(f, 1.0 + i % 3);
    const auto ic = sobolev::interpolation_check(s, -0.5, 0.5, 1.5);
    worst = std::max(worst, ic.ratio);
    if (ic.lhs > ic.rhs * (1.0 + 1e-12)) ++violations;
    const auto pc = sobolev::poincare_check(s, 1.0);
    if (!pc.holds) ++violations;
  }
  return {{"pass", violations == 0}, {"trials", trials}, {"violations", violations},
          {"max_interpolation_ratio", worst}};
}

json suite_elliptic(std::uint64_t seed) {
  const double L = 1.0;
  elliptic::LatticeKernel k(L);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-L, L);
  double per = 0.0;
  for (int i = 0; i < 100; ++i) {
    const elliptic::cplx z(u(rng), u(rng));
    if (std::abs(z) < 0.05) continue;
    const double v = elliptic::lambda(k, z);
    per = std::max({per, std::abs(elliptic::lambda(k, z + elliptic::cplx(2 * L, 0)) - v),
                    std::abs(elliptic::lambda(k, z + elliptic::cplx(0, 2 * L)) - v)});
  }
  const double leg = elliptic::legendre_residual(k);
  const auto charge = elliptic::charge_check(k, 0.25, 64, 1e-3, 100, static_cast<unsigned>(seed));
  return {{"pass", per <= 1e-10 && leg <= 1e-12 && charge.residual <= 1e-6},
          {"periodicity_residual", per},
          {"legendre_residual", leg},
          {"charge_residual", charge.residual},
          {"boundary_flux", charge.boundary_flux},
          {"max_laplacian_error", charge.max_laplacian_error}};
}

json suite_trace() {
  const int kmax = 32;
  spectral::RealSeries g(kmax + 1);
  for (int k = 1; k <= kmax; ++k) g.a[k] = 1.0;
  const auto table = potential::trace_equality_disk(g, kmax);
  double worst = 0.0;
  for (const auto& row : table.modes) {
    const double ref = kPi * row.k;
    worst = std::max({worst, std::abs(row.interior - ref) / ref, std::abs(row.exterior - ref) / ref,
                      std::abs(row.h_half - ref) / ref});
  }
  return {{"pass", worst <= 1e-10}, {"k_max", kmax}, {"max_relative_error", worst}};
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& sets, const std::string& outdir,
                 std::ostream& out) {
  RunConfig cfg = load_config(config_path);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!outdir.empty()) cfg.output_dir = outdir;
  validate_config(cfg);
  const auto r = evolution::run(cfg);
  json j = {{"status", r.status},
            {"steps", r.final_state.step_count},
            {"t", r.final_state.t},
            {"rows", r.log.rows.size()},
            {"rejections", r.rejections},
            {"recenters", r.recenters},
            {"max_area_drift", r.max_area_drift},
            {"trajectory", cfg.trajectory_path()},
            {"events", cfg.events_path()}};
  out << j.dump(2) << '\n';
  const bool ok = r.status == "finished" || r.status == "e_stop" || r.status == "max_steps";
  return ok ? 0 : 1;
}

int cmd_checks(const std::string& suites, long n, std::uint64_t seed, const std::string& traj_path, std::ostream& out) {
  std::vector<std::string> names;
  std::stringstream ss(suites);
  std::string s;
  while (std::getline(ss, s, ',')) {
    if (s == "all") {
      names = {"fuglede", "eed", "diff", "regime", "bary", "embed", "sobolev", "elliptic", "trace"};
      break;
    }
    if (!s.empty()) names.push_back(s);
  }
  static const std::vector<std::string> known = {"fuglede", "eed", "diff",     "regime", "bary",
                                                 "embed",   "sobolev", "elliptic", "trace"};
  for (const auto& name : names)
    if (std::find(known.begin(), known.end(), name) == known.end()) throw UsageError("unknown suite '" + name + "'");
  if (names.empty()) throw UsageError("no suite selected");

  std::optional<TrajectoryLog> log;
  auto need_log = [&]() -> const TrajectoryLog& {
    if (!log) log = trajectory_for(traj_path);
    return *log;
  };
  json summary = {{"seed", seed}, {"suites", json::object()}};
  bool all = true;
  for (const auto& name : names) {
    json r;
    if (name == "fuglede") r = suite_fuglede(n, seed);
    else if (name == "eed") r = suite_eed(need_log());
    else if (name == "diff") r = suite_diff(need_log());
    else if (name == "regime") r = suite_regime(need_log());
    else if (name == "bary") r = suite_bary(need_log());
    else if (name == "embed") r = suite_embed();
    else if (name == "sobolev") r = suite_sobolev(seed);
    else if (name == "elliptic") r = suite_elliptic(seed);
    else r = suite_trace();
    all = all && r["pass"].get<bool>();
    summary["suites"][name] = r;
  }
  summary["pass"] = all;
  out << summary.dump(2) << '\n';
  return all ? 0 : 1;
}

int cmd_hminus(const std::string& a_path, const std::string& b_path, int grid, int direct_grid, std::ostream& out) {
  const auto a = curve_io::load(a_path);
  const auto b = curve_io::load(b_path);
  potential::HOptions opts;
  opts.grid = grid;
  const auto fft = potential::squared_distance(a, b, opts);
  json j = {{"H", fft.H}, {"grid", grid}, {"box_half_edge", fft.L}, {"band_cells", fft.band_cells},
            {"grid_too_coarse", fft.grid_too_coarse}};
  if (direct_grid > 0) {
    potential::DirectOptions d;
    d.grid = direct_grid;
    const double H = potential::squared_distance_direct(a, b, d);
    j["H_direct"] = H;
    j["relative_delta"] = H != 0.0 ? (fft.H - H) / H : 0.0;
  }
  out << std::setprecision(17) << j.dump(2) << '\n';
  return 0;
}

int cmd_potential_table(double L, int n, std::ostream& out) {
  if (!(L > 0.0) || n < 2) throw UsageError("need L > 0 and n >= 2");
  elliptic::LatticeKernel k(L);
  out << "# Lambda on an n x n cell-centred grid of [-L, L)^2, L=" << std::setprecision(17) << L << "\nx,y,Lambda\n";
  const double h = 2.0 * L / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -L + (i + 0.5) * h;
      const double y = -L + (j + 0.5) * h;
      out << x << ',' << y << ',' << elliptic::lambda(k, {x, y}) << '\n';
    }
  return 0;
}

int cmd_norms(const std::string& path, std::ostream& out) {
  const auto curve = curve_io::load(path);
  geometry::CacheOptions copts;
  copts.policy = geometry::ResolutionPolicy::Warn;
  const auto cache = geometry::build_cache(curve, copts);
  const auto solve = potential::solve_ms(cache, potential::kernel_for(curve.domain));
  const auto adm = geometry::admissibility_report(curve);
  const auto bon = geometry::bonnesen_monitor(cache);
  const auto fug = analysis::check_fuglede(curve);
  const auto emb = analysis::check_improved_embedding(cache, solve);
  const auto c = geometry::barycenter_bulk(cache);
  json j = {{"perimeter", geometry::perimeter(cache)},
            {"area", geometry::enclosed_area(cache)},
            {"E", geometry::energy_gap(cache)},
            {"isoperimetric_deficit", geometry::isoperimetric_deficit(cache)},
            {"D", potential::dissipation(cache, solve)},
            {"barycenter", {c.x(), c.y()}},
            {"resolution_warning", cache.resolution_warning},
            {"admissibility",
             {{"annulus", adm.annulus}, {"slope", adm.slope}, {"barycenter", adm.barycenter},
              {"area", adm.area}, {"passed", adm.passed()}}},
            {"bonnesen", {{"lhs", bon.lhs}, {"rhs", bon.rhs}, {"R_out", bon.R_out}, {"R_in", bon.R_in}}},
            {"fuglede",
             {{"deficit", fug.deficit}, {"lower", fug.lower}, {"upper", fug.upper},
              {"hypotheses", fug.hypotheses}, {"pass", fug.pass}}},
            {"embedding", {{"ratio", emb.ratio}, {"bound", emb.bound}, {"kappa_l1", emb.kappa_l1}}},
            {"boundary_control_ratio", analysis::boundary_control_ratio(cache)}};
  try {
    const auto v = potential::normal_velocity_sobolev(cache, solve);
    j["V"] = {{"l2", v.l2}, {"vs_l2", v.vs_l2}, {"h_minus_half", v.h_minus_half}};
  } catch (const Error& e) {
    j["V"] = {{"error", e.what()}};
  }
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_report(const std::string& path, std::ostream& out) {
  const auto log = trajectory::load(path);
  const auto fit = analysis::regime_fit(log);
  const auto eed = analysis::check_eed(log);
  const auto diff = analysis::check_differential(log);
  const auto bary = analysis::barycenter_monitor(log);
  out << std::setprecision(6);
  out << "# trajectory " << path << " (status " << log.meta.status << ", " << log.rows.size() << " rows)\n";
  out << "quantity value\n";
  out << "algebraic_window " << (fit.has_algebraic ? "yes" : "no") << '\n';
  if (fit.has_algebraic)
    out << "alg_slope " << fit.alg_slope << "\nalg_t_begin " << log.rows[fit.algebraic.begin].t << "\nalg_t_end "
        << log.rows[fit.algebraic.end - 1].t << '\n';
  out << "exponential_window " << (fit.has_exponential ? "yes" : "no") << '\n';
  if (fit.has_exponential)
    out << "exp_rate " << fit.exp_rate << "\nT1 " << fit.T1 << "\nT1_over_R3 " << fit.T1_over_R3 << '\n';
  if (!fit.note.empty()) out << "note " << fit.note << '\n';
  out << "max_E_over_R3D " << eed.max_E_over_R3D << "\nmax_E_over_sqrtHD " << eed.max_E_over_sqrtHD
      << "\nE2D_monotone " << (eed.monotone ? "yes" : "no") << "\nmax_energy_balance_error "
      << diff.max_balance_error << "\nmax_dH_over_sqrtHD " << diff.max_dH_ratio << "\nmax_bary_ratio "
      << bary.max_ratio << "\nmax_bary_velocity_ratio " << bary.max_velocity_ratio << '\n';
  return eed.pass() && diff.pass() ? 0 : 1;
}

}  // namespace

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("MSRELAX_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mullins-Sekerka relaxation of nearly circular curves"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "integrate the flow from a config file");
  std::string config_path, outdir;
  std::vector<std::string> sets;
  sim->add_option("--config", config_path, "key = value config file")->required();
  sim->add_option("--set", sets, "override a config key (key=value)");
  sim->add_option("--output-dir", outdir, "directory for trajectory.csv and run.jsonl");

  auto* chk = app.add_subcommand("checks", "run verification suites, JSON summary on stdout");
  std::string suites = "all", traj_path;
  long n = 1000;
  std::uint64_t seed = 7;
  chk->add_option("--suite", suites,
                  "comma list of fuglede, eed, diff, regime, bary, embed, sobolev, elliptic, trace, or all");
  chk->add_option("--n", n, "trials for the fuglede suite");
  chk->add_option("--seed", seed, "random seed");
  chk->add_option("--trajectory", traj_path, "trajectory.csv for eed/diff/regime/bary (default: built-in run)");

  auto* hm = app.add_subcommand("hminus", "squared H^-1 distance between two curves");
  std::string a_path, b_path;
  int grid = 1024, direct_grid = 64;
  hm->add_option("a", a_path)->required();
  hm->add_option("b", b_path)->required();
  hm->add_option("--grid", grid, "FFT grid size");
  hm->add_option("--direct-grid", direct_grid, "oracle grid size (0 disables the oracle)");

  auto* pt = app.add_subcommand("potential-table", "periodic fundamental solution on a grid, CSV");
  double L = 1.0;
  int tn = 64;
  pt->add_option("--L", L, "half edge of the torus cell");
  pt->add_option("--n", tn, "grid points per side");

  auto* nm = app.add_subcommand("norms", "geometric and velocity diagnostics of one curve");
  std::string curve_path;
  nm->add_option("curve", curve_path)->required();

  auto* rp = app.add_subcommand("report", "regime-fit table of a trajectory");
  std::string report_path;
  rp->add_option("trajectory", report_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(config_path, sets, outdir, out);
    if (*chk) return cmd_checks(suites, n, seed, traj_path, out);
    if (*hm) return cmd_hminus(a_path, b_path, grid, direct_grid, out);
    if (*pt) return cmd_potential_table(L, tn, out);
    if (*nm) return cmd_norms(curve_path, out);
    if (*rp) return cmd_report(report_path, out);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace msrelax::cli
