// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Trajectory runs are shared between criteria; artifacts go to ./acceptance_out.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "msrelax/analysis.hpp"
#include "msrelax/cli.hpp"
#include "msrelax/elliptic.hpp"
#include "msrelax/evolution.hpp"
#include "msrelax/potential.hpp"
#include "msrelax/squared_distance.hpp"

using namespace msrelax;

namespace {

constexpr double kPi = 3.14159265358979323846;

namespace tol {
constexpr double rate_plane = 0.02;
constexpr double rate_torus = 0.05;
constexpr double run_seconds = 60.0;
constexpr double balance = 1e-3;
constexpr double area_post = 1e-12;
constexpr double area_pre = 1e-9;
constexpr double eed_slack = 1e-9;
constexpr long fuglede_trials = 1000;
constexpr double fuglede_delta = 0.05;
constexpr double fuglede_seconds = 30.0;
constexpr double trace = 1e-10;
constexpr double periodicity = 1e-10;
constexpr double legendre = 1e-12;
constexpr double charge = 1e-6;
constexpr double bie = 1e-8;
constexpr double h_oracle = 0.01;
constexpr double e_over_d = 0.05;
constexpr double refinement = 0.01;
constexpr double alg_slope = 0.15;
constexpr double exp_rate = 0.10;
constexpr double t1_refinement = 0.10;
constexpr double regime_seconds = 600.0;
constexpr double bary_cap = 5.0;
}  // namespace tol

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  std::string name;
  TrajectoryLog log;
  std::string status;
  double max_area_drift = 0.0;
  double seconds = 0.0;
};

Run simulate(const std::string& name, const RunConfig& cfg) {
  evolution::RunHooks hooks;
  hooks.write_files = false;
  const auto t0 = std::chrono::steady_clock::now();
  auto r = evolution::run(cfg, hooks);
  Run out{name, std::move(r.log), r.status, r.max_area_drift, seconds_since(t0)};
  std::fprintf(stderr, "  run %-14s %-9s %5zu rows  %.1f s\n", name.c_str(), out.status.c_str(), out.log.rows.size(),
               out.seconds);
  return out;
}

RunConfig single_mode_run(int k, const std::string& domain = "plane", double L = 0.0) {
  RunConfig c;
  c.domain = domain;
  c.L = L;
  c.N = 128;
  c.modes = {k};
  c.amps = {1e-3};
  // about ten e-folds of E, which decays at 4k(k^2 - 1)
  c.t_end = 10.0 / (4.0 * k * (k * k - 1));
  c.k_H = 0;
  return c;
}

RunConfig standard_run(int N) {
  RunConfig c;
  c.N = N;
  c.modes = {2, 3};
  c.amps = {0.01, 0.008};
  c.phases = {0.0, 1.0};
  c.t_end = 0.3;
  c.k_H = 10;
  c.grid = 512;
  return c;
}

RunConfig regime_run(int N) {
  RunConfig c;
  c.N = N;
  for (int k = 8; k <= 16; ++k) c.modes.push_back(k);
  c.amps = {6e-4};
  c.random_phases = true;
  c.seed = 3;
  c.t_end = 0.3;
  c.k_H = 5;
  c.grid = 512;
  return c;
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s  C%02d  %-28s %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- criteria -------------------------------------------------------------

void criterion_rates(const std::vector<Run>& plane, const Run& torus) {
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const int k = static_cast<int>(i) + 2;
    const double expected = 2.0 * k * (k * k - 1);
    const auto fit = analysis::regime_fit(plane[i].log);
    const double rel = std::abs(fit.exp_rate / expected - 1.0);
    pass = pass && fit.has_exponential && rel <= tol::rate_plane && plane[i].seconds <= tol::run_seconds;
    detail += fmt("k=%d %.4g/%g (%.1e, %.0fs) ", k, fit.exp_rate, expected, rel, plane[i].seconds);
  }
  const auto fit = analysis::regime_fit(torus.log);
  const double rel = std::abs(fit.exp_rate / 12.0 - 1.0);
  pass = pass && fit.has_exponential && rel <= tol::rate_torus && torus.seconds <= tol::run_seconds;
  detail += fmt("torus L=8R %.4g/12 (%.1e, %.0fs) tol 2%%/5%%, %gs", fit.exp_rate, rel, torus.seconds, tol::run_seconds);
  report(1, pass, "linearized decay rates", detail);
}

void criterion_balance(const std::vector<const Run*>& runs) {
  double worst = 0.0;
  std::string where;
  long intervals = 0;
  for (const auto* r : runs) {
    const auto d = analysis::check_differential(r->log, tol::balance);
    intervals += d.intervals;
    if (d.max_balance_error >= worst) {
      worst = d.max_balance_error;
      where = r->name;
    }
  }
  report(2, worst <= tol::balance, "energy balance dE/dt = -D",
         fmt("max rel error %.2e (%s) over %ld intervals in %zu runs, tol %g", worst, where.c_str(), intervals,
             runs.size(), tol::balance));
}

void criterion_area(const std::vector<const Run*>& runs) {
  double post = 0.0, pre = 0.0;
  for (const auto* r : runs) {
    pre = std::max(pre, r->max_area_drift);
    for (const auto& row : r->log.rows) post = std::max(post, std::abs(row.area_error));
  }
  report(3, post <= tol::area_post && pre <= tol::area_pre, "area conservation",
         fmt("post-projection %.1e (tol %g), pre-projection drift %.1e (tol %g)", post, tol::area_post, pre,
             tol::area_pre));
}

void criterion_eed(const std::vector<const Run*>& runs) {
  bool pass = true;
  double worst = 0.0;
  for (const auto* r : runs) {
    const auto e = analysis::check_eed(r->log, tol::eed_slack);
    pass = pass && e.pass();
    worst = std::max(worst, e.worst_increase);
  }
  report(4, pass, "E^2 D non-increasing",
         fmt("%zu runs, largest step increase %.1e of E^2D(0), slack %g", runs.size(), worst, tol::eed_slack));
}

void criterion_fuglede() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = analysis::fuglede_suite(tol::fuglede_trials, 20240601, tol::fuglede_delta, cli::worker_count());
  const double secs = seconds_since(t0);
  const bool pass = s.passed == s.trials && secs <= tol::fuglede_seconds;
  report(5, pass, "Fuglede sandwich 1/10, 3/5",
         fmt("%ld/%ld pass at delta %g, deficit/upper <= %.3f, deficit/lower >= %.2f, %.1fs (limit %gs)", s.passed,
             s.trials, tol::fuglede_delta, s.max_deficit_over_upper, s.min_deficit_over_lower, secs,
             tol::fuglede_seconds));
}

void criterion_trace() {
  const int kmax = 32;
  spectral::RealSeries g(kmax + 1);
  for (int k = 1; k <= kmax; ++k) g.a[k] = 1.0;
  const auto t = potential::trace_equality_disk(g, kmax);
  double worst = 0.0;
  for (const auto& row : t.modes) {
    const double ref = kPi * row.k;
    worst = std::max({worst, std::abs(row.interior - ref), std::abs(row.exterior - ref), std::abs(row.h_half - ref)});
  }
  report(6, worst <= tol::trace, "trace equality on the disk",
         fmt("max |energy - pi k| over k<=%d, both sides: %.1e, tol %g", kmax, worst, tol::trace));
}

void criterion_elliptic() {
  const double L = 1.0;
  elliptic::LatticeKernel k(L);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-L, L);
  double per = 0.0;
  int points = 0;
  while (points < 100) {
    const elliptic::cplx z(u(rng), u(rng));
    if (std::abs(z) < 0.05 * L) continue;
    const double v = elliptic::lambda(k, z);
    per = std::max({per, std::abs(elliptic::lambda(k, z + elliptic::cplx(2 * L, 0)) - v),
                    std::abs(elliptic::lambda(k, z + elliptic::cplx(0, 2 * L)) - v)});
    ++points;
  }
  const double leg = elliptic::legendre_residual(k);
  const auto charge = elliptic::charge_check(k);
  const bool pass = per <= tol::periodicity && leg <= tol::legendre && charge.residual <= tol::charge;
  report(7, pass, "elliptic kernel",
         fmt("periodicity %.1e (tol %g), Legendre %.1e (tol %g), charge %.1e (tol %g)", per, tol::periodicity, leg,
             tol::legendre, charge.residual, tol::charge));
}

void criterion_bie(const std::filesystem::path& out_dir) {
  std::ofstream csv(out_dir / "bie_convergence.csv");
  csv << "# single-layer density error on the unit disk, data cos(k phi); exact density -2k cos(k phi)\n";
  csv << "# last block: curve 1 + 0.1 cos 2phi + 0.05 sin 5phi, MS velocity against N = 512\n";
  csv << "case,N,k,max_error\n";
  auto disk_error = [](int N, int k) {
    const auto cache = geometry::build_cache(geometry::circle(1.0, N));
    std::vector<double> g(cache.M);
    for (int j = 0; j < cache.M; ++j) g[j] = std::cos(k * cache.phi[j]);
    const auto s = potential::solve_with_data(cache, potential::Kernel::plane(), g);
    double e = 0.0;
    for (int j = 0; j < cache.M; ++j) e = std::max(e, std::abs(s.density.values[j] + 2.0 * k * std::cos(k * cache.phi[j])));
    return e;
  };
  double worst = 0.0;
  for (int N : {16, 32, 64, 128, 256})
    for (int k = 1; k <= 8; ++k) {
      const double e = disk_error(N, k);
      csv << "disk," << N << ',' << k << ',' << e << '\n';
      if (N == 256) worst = std::max(worst, e);
    }
  auto velocity_at = [](int N, const std::vector<double>& at) {
    const auto curve = geometry::from_function(
        [](double p) { return 1.0 + 0.1 * std::cos(2 * p) + 0.05 * std::sin(5 * p); }, 1.0, N);
    const auto cache = geometry::build_cache(curve);
    const auto s = potential::solve_ms(cache, potential::Kernel::plane());
    return spectral::interpolate(s.density.values, at);
  };
  const auto probe = spectral::nodes(32);
  const auto ref = velocity_at(512, probe);
  for (int N : {16, 32, 64, 128, 256}) {
    const auto v = velocity_at(N, probe);
    double e = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) e = std::max(e, std::abs(v[j] - ref[j]));
    csv << "perturbed," << N << ",0," << e << '\n';
  }
  report(8, worst < tol::bie, "BIE disk mode density",
         fmt("max error k<=8 at N=256: %.1e (tol %g); decay curve in %s", worst, tol::bie,
             (out_dir / "bie_convergence.csv").string().c_str()));
}

void criterion_h_oracle() {
  auto compare = [](const geometry::RadialCurve& a, const geometry::RadialCurve& b) {
    potential::HOptions fo;
    fo.grid = 1024;
    potential::DirectOptions d;
    d.grid = 64;
    const double fft = potential::squared_distance(a, b, fo).H;
    const double direct = potential::squared_distance_direct(a, b, d);
    return std::pair{fft, direct};
  };
  const auto shifted =
      geometry::from_function([](double p) { return geometry::shifted_disk_radius(1.0, 0.05, 0.3, p); }, 1.0, 64);
  const auto mode2 = geometry::project_area(
      geometry::from_function([](double p) { return 1.0 + 0.02 * std::cos(2 * p); }, 1.0, 64));
  const auto [f1, d1] = compare(shifted, potential::disk_like(shifted, geometry::Vec2::Zero()));
  const auto [f2, d2] = compare(mode2, potential::disk_like(mode2, geometry::Vec2::Zero()));
  const double r1 = std::abs(f1 / d1 - 1.0), r2 = std::abs(f2 / d2 - 1.0);
  report(9, r1 <= tol::h_oracle && r2 <= tol::h_oracle, "H: FFT vs direct oracle",
         fmt("shifted disk %.4e vs %.4e (%.1e), mode 2 %.4e vs %.4e (%.1e), tol %g", f1, d1, r1, f2, d2, r2,
             tol::h_oracle));
}

void criterion_static_monitors(const Run& coarse, const Run& fine) {
  bool pass = true;
  std::string detail;
  for (int k = 2; k <= 4; ++k) {
    const double target = 1.0 / (4.0 * k * (k * k - 1));
    double last = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto curve = geometry::project_area(
          geometry::from_function([=](double p) { return 1.0 + eps * std::cos(k * p); }, 1.0, 64));
      const auto cache = geometry::build_cache(curve);
      const auto solve = potential::solve_ms(cache, potential::Kernel::plane());
      last = geometry::isoperimetric_deficit(cache) / potential::dissipation(cache, solve);
    }
    const double rel = std::abs(last / target - 1.0);
    pass = pass && rel <= tol::e_over_d;
    detail += fmt("k=%d %.5f/%.5f ", k, last, target);
  }
  const auto a = analysis::check_eed(coarse.log);
  const auto b = analysis::check_eed(fine.log);
  const double change = std::abs(b.max_E_over_sqrtHD / a.max_E_over_sqrtHD - 1.0);
  const bool finite = a.finite && b.finite && a.H_rows > 0 && b.H_rows > 0;
  pass = pass && finite && change <= tol::refinement;
  detail += fmt("(tol 5%%); max E/sqrt(HD) N=64 %.4f N=128 %.4f change %.1e (tol %g)", a.max_E_over_sqrtHD,
                b.max_E_over_sqrtHD, change, tol::refinement);
  report(10, pass, "static inequality monitors", detail);
}

void criterion_regime(const Run& coarse, const Run& fine) {
  const auto a = analysis::regime_fit(coarse.log);
  const auto b = analysis::regime_fit(fine.log);
  const double E0 = coarse.log.rows.front().E, D0 = coarse.log.rows.front().D;
  auto ok = [](const analysis::RegimeFit& f) {
    return f.has_algebraic && f.has_exponential && std::abs(f.alg_slope + 1.0) <= tol::alg_slope &&
           std::abs(f.exp_rate / 12.0 - 1.0) <= tol::exp_rate;
  };
  const double t1_change = std::abs(b.T1_over_R3 / a.T1_over_R3 - 1.0);
  const bool pass = ok(a) && ok(b) && E0 <= 1e-3 && t1_change <= tol::t1_refinement &&
                    coarse.seconds <= tol::regime_seconds && fine.seconds <= tol::regime_seconds;
  report(11, pass, "regime structure",
         fmt("E0 %.1e D0 %.1e; N=64: slope %.3f rate %.2f C=T1/R^3 %.4f; N=128: slope %.3f rate %.2f C %.4f; "
             "C change %.1e (tol %g), slope tol %g, rate tol %g, %.0fs/%.0fs",
             E0, D0, a.alg_slope, a.exp_rate, a.T1_over_R3, b.alg_slope, b.exp_rate, b.T1_over_R3, t1_change,
             tol::t1_refinement, tol::alg_slope, tol::exp_rate, coarse.seconds, fine.seconds));
}

void criterion_barycenter(const Run& standard) {
  const auto b = analysis::barycenter_monitor(standard.log, tol::bary_cap);
  report(12, b.pass(), "barycenter confinement",
         fmt("max |c(t)-c(0)|/sqrt(E0 R) %.2e (cap %g), max |c'|^2 |Omega|/D %.2e", b.max_ratio, tol::bary_cap,
             b.max_velocity_ratio));
}

}  // namespace

int main() {
  const std::filesystem::path out_dir = "acceptance_out";
  std::filesystem::create_directories(out_dir);
  const auto t0 = std::chrono::steady_clock::now();

  std::printf("acceptance: 12 criteria\n");
  std::fflush(stdout);
  std::vector<Run> plane;
  for (int k = 2; k <= 4; ++k) plane.push_back(simulate("mode" + std::to_string(k), single_mode_run(k)));
  const Run torus = simulate("torus_mode2", single_mode_run(2, "torus", 8.0));
  const Run std64 = simulate("standard_N64", standard_run(64));
  const Run std128 = simulate("standard_N128", standard_run(128));
  const Run reg64 = simulate("regime_N64", regime_run(64));
  const Run reg128 = simulate("regime_N128", regime_run(128));

  std::vector<const Run*> all;
  for (const auto& r : plane) all.push_back(&r);
  for (const Run* r : {&torus, &std64, &std128, &reg64, &reg128}) all.push_back(r);
  for (const Run* r : all) {
    std::ofstream f(out_dir / (r->name + ".csv"));
    trajectory::write(f, r->log);
  }

  criterion_rates(plane, torus);
  criterion_balance(all);
  criterion_area(all);
  criterion_eed(all);
  criterion_fuglede();
  criterion_trace();
  criterion_elliptic();
  criterion_bie(out_dir);
  criterion_h_oracle();
  criterion_static_monitors(std64, std128);
  criterion_regime(reg64, reg128);
  criterion_barycenter(std64);

  std::printf("acceptance: %d of 12 failed, %.0f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
