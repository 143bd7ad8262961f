#include "msrelax/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "msrelax/error.hpp"
#include "msrelax/squared_distance.hpp"

namespace msrelax::analysis {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, std::size_t b, std::size_t e) {
  const double n = static_cast<double>(e - b);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = b; i < e; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = b; i < e; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 0.0;
  return f;
}

Window make_window(const std::vector<std::size_t>& rows, std::size_t b, std::size_t e, const LineFit& f) {
  Window w;
  w.begin = rows[b];
  w.end = rows[e - 1] + 1;
  w.slope = f.slope;
  w.intercept = f.intercept;
  w.r2 = f.r2;
  return w;
}

}  // namespace

DiagnosticsRecord record(const evolution::FlowState& state, const geometry::GeometryCache& cache,
                         const potential::BieSolve& solve, const RecordContext& ctx) {
  DiagnosticsRecord r;
  r.step = state.step_count;
  r.t = state.t;
  r.dt = ctx.dt;
  r.E = geometry::isoperimetric_deficit(cache);
  r.D = potential::dissipation(cache, solve);
  const geometry::Vec2 c = geometry::barycenter_bulk(cache);
  r.bary_x = c.x();
  r.bary_y = c.y();
  r.bary = (c - ctx.c0).norm();

  const auto& V = solve.density.values;
  const auto Vphi = spectral::differentiate_nodes(V, 1);
  const double h = cache.weight();
  const double kbar = geometry::mean_curvature(cache);
  for (int j = 0; j < cache.M; ++j) {
    r.V2 += h * cache.ell[j] * V[j] * V[j];
    r.Vs2 += h * Vphi[j] * Vphi[j] / cache.ell[j];
    r.sup_rho_dev = std::max(r.sup_rho_dev, std::abs(cache.rho_dev[j]));
    r.sup_slope = std::max(r.sup_slope, std::abs(cache.rho_phi[j]));
    const double dk = cache.kappa[j] - kbar;
    r.kappa_l1 += h * cache.ell[j] * std::abs(dk);
    r.kappa_l2sq += h * cache.ell[j] * dk * dk;
    r.rho_phi_l2sq += h * cache.rho_phi[j] * cache.rho_phi[j];
  }
  r.EED = r.E * r.E * r.D;
  r.area_error = geometry::enclosed_area(cache) / (kPi * cache.R * cache.R) - 1.0;
  r.area_drift = ctx.area_drift;
  const auto& s = state.curve.rho_hat;
  for (int k = 0; k < kRecordedModes && k < s.size(); ++k) r.mode_amps[k] = std::hypot(s.a[k], s.b[k]);

  if (ctx.with_H) {
    potential::HOptions opts;
    opts.grid = ctx.H_grid;
    r.H = potential::squared_distance(state.curve, c, opts).H;
  } else {
    r.H = kNaN;
  }
  return r;
}

FugledeResult check_fuglede(const geometry::RadialCurve& curve) {
  geometry::CacheOptions copts;
  copts.policy = geometry::ResolutionPolicy::Ignore;
  const auto cache0 = geometry::build_cache(curve, copts);
  const geometry::Vec2 c = geometry::barycenter_bulk(cache0);
  const double scale = std::sqrt(kPi / geometry::enclosed_area(cache0));

  geometry::RadialCurve unit;
  unit.R = 1.0;
  unit.pole = geometry::Vec2::Zero();
  if ((c - curve.pole).norm() > 0.0) {
    const auto rho = geometry::radial_function_about(curve, c, spectral::nodes(curve.node_count()));
    unit.rho_hat = spectral::analyze(rho, curve.modes());
  } else {
    unit.rho_hat = curve.rho_hat;
  }
  for (int k = 0; k < unit.modes(); ++k) {
    unit.rho_hat.a[k] *= scale;
    unit.rho_hat.b[k] *= scale;
  }
  const auto cache = geometry::build_cache(unit, copts);

  FugledeResult r;
  r.deficit = geometry::isoperimetric_deficit(cache) / (2.0 * kPi);
  const auto& s = unit.rho_hat;
  double u2 = (s.a[0] - 1.0) * (s.a[0] - 1.0);
  double up2 = 0.0;
  for (int k = 1; k < s.size(); ++k) {
    const double e = s.a[k] * s.a[k] + s.b[k] * s.b[k];
    u2 += 0.5 * e;
    up2 += 0.5 * k * k * e;
  }
  r.lower = 0.1 * (u2 + up2);
  r.upper = 0.6 * up2;
  for (int j = 0; j < cache.M; ++j) {
    r.sup_u = std::max(r.sup_u, std::abs(cache.rho_dev[j]));
    r.sup_u_phi = std::max(r.sup_u_phi, std::abs(cache.rho_phi[j]));
  }
  r.hypotheses = r.sup_u <= 3.0 / 40.0 && r.sup_u_phi <= 0.5;
  constexpr double kSlack = 1e-14;
  r.pass = r.hypotheses && r.lower <= r.deficit + kSlack && r.deficit <= r.upper + kSlack;
  return r;
}

geometry::RadialCurve random_admissible(std::mt19937_64& rng, double delta, int n_modes, double R) {
  std::uniform_int_distribution<int> kdist(2, 16);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> level(0.1, 0.95);
  geometry::CacheOptions copts;
  copts.policy = geometry::ResolutionPolicy::Ignore;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int kmax = std::min(kdist(rng), n_modes - 1);
    geometry::RadialCurve curve = geometry::circle(R, n_modes);
    for (int k = 2; k <= kmax; ++k) {
      curve.rho_hat.a[k] = normal(rng) / k;
      curve.rho_hat.b[k] = normal(rng) / k;
    }
    geometry::RadialCurve probe = curve;
    probe.rho_hat.a[0] = 0.0;
    const auto u = spectral::synthesize(probe.rho_hat, 4 * n_modes);
    const auto up = spectral::synthesize(spectral::derivative(probe.rho_hat), 4 * n_modes);
    double sup = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) sup = std::max({sup, std::abs(u[j]), std::abs(up[j])});
    if (!(sup > 0.0)) continue;
    const double f = level(rng) * delta * R / sup;
    for (int k = 2; k <= kmax; ++k) {
      curve.rho_hat.a[k] *= f;
      curve.rho_hat.b[k] *= f;
    }
    curve = geometry::project_area(curve);
    curve = evolution::recenter(evolution::FlowState{curve, 0.0, 0, 0.0}).curve;
    if (geometry::admissibility_report(curve, delta).passed()) return curve;
  }
  throw Error(ErrorKind::InvalidArgument, "could not draw an admissible curve");
}

FugledeSuite fuglede_suite(long trials, std::uint64_t seed, double delta, int threads) {
  std::vector<FugledeResult> results(static_cast<std::size_t>(std::max(trials, 0L)));
  auto work = [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
      results[i] = check_fuglede(random_admissible(rng, delta));
    }
  };
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max(trials, 1L))));
  if (threads == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (trials + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, std::min(trials, w * chunk), std::min(trials, (w + 1) * chunk));
    for (auto& t : pool) t.join();
  }
  FugledeSuite s;
  s.trials = trials;
  s.min_deficit_over_lower = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    if (r.pass) ++s.passed;
    if (!r.hypotheses) ++s.hypothesis_failures;
    if (r.upper > 0.0) s.max_deficit_over_upper = std::max(s.max_deficit_over_upper, r.deficit / r.upper);
    if (r.lower > 0.0) s.min_deficit_over_lower = std::min(s.min_deficit_over_lower, r.deficit / r.lower);
  }
  return s;
}

void EedReport::require() const {
  if (!pass())
    throw Error(ErrorKind::MonotoneViolation,
                "E^2 D increased by " + std::to_string(worst_increase) + " of its initial value");
}

EedReport check_eed(const TrajectoryLog& log, double slack) {
  EedReport r;
  const double R3 = log.meta.R * log.meta.R * log.meta.R;
  const auto& rows = log.rows;
  if (rows.empty()) return r;
  const double eed0 = rows.front().EED;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.E > 0.0 && row.D > 0.0) {
      const double q = row.E / (R3 * row.D);
      if (!std::isfinite(q)) r.finite = false;
      r.max_E_over_R3D = std::max(r.max_E_over_R3D, q);
      r.last_E_over_R3D = q;
      ++r.rows_checked;
      if (std::isfinite(row.H) && row.H > 0.0) {
        const double p = row.E / std::sqrt(row.H * row.D);
        if (!std::isfinite(p)) r.finite = false;
        r.max_E_over_sqrtHD = std::max(r.max_E_over_sqrtHD, p);
        ++r.H_rows;
      }
    }
    if (i > 0) {
      const double inc = row.EED - rows[i - 1].EED;
      if (eed0 > 0.0) r.worst_increase = std::max(r.worst_increase, inc / eed0);
      if (inc > slack * eed0) r.monotone = false;
    }
  }
  return r;
}

void DifferentialReport::require() const {
  if (!pass())
    throw Error(ErrorKind::EnergyBalanceFail,
                "dE/dt + D off by " + std::to_string(max_balance_error) + " relative");
}

DifferentialReport check_differential(const TrajectoryLog& log, double tolerance, double d_floor) {
  DifferentialReport r;
  r.tolerance = tolerance;
  const auto& rows = log.rows;
  if (rows.size() < 4) return r;
  double dmax = 0.0;
  for (const auto& row : rows) dmax = std::max(dmax, row.D);
  for (std::size_t i = 1; i + 2 < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = rows[i + 1];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    const double Dm = 0.5 * (a.D + b.D);
    if (!(Dm > d_floor * dmax) || Dm <= 0.0) continue;
    const double dE = (b.E - a.E) / dt;
    r.max_balance_error = std::max(r.max_balance_error, std::abs(dE + Dm) / Dm);
    ++r.intervals;

    const double Em = 0.5 * (a.E + b.E);
    const double Vs2m = 0.5 * (a.Vs2 + b.Vs2);
    const double dD = (b.D - a.D) / dt;
    if (dD + 2.0 * Vs2m > 0.0) ++r.dD_positive;
    const double scale = Em * Dm * Dm * Dm + std::pow(Dm, 2.5);
    if (scale > 0.0) r.max_dD_ratio = std::max(r.max_dD_ratio, std::max(0.0, dD + Vs2m) / scale);
  }
  std::size_t prev = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i].H)) continue;
    if (prev < rows.size()) {
      const auto& a = rows[prev];
      const auto& b = rows[i];
      const double dt = b.t - a.t;
      const double HD = 0.25 * (a.H + b.H) * (a.D + b.D);
      if (dt > 0.0 && HD > 0.0) {
        r.max_dH_ratio = std::max(r.max_dH_ratio, std::abs(b.H - a.H) / dt / std::sqrt(HD));
        ++r.H_intervals;
      }
    }
    prev = i;
  }
  return r;
}

RegimeFit regime_fit(const TrajectoryLog& log, const RegimeFitOptions& options) {
  RegimeFit fit;
  const double R = log.meta.R;
  std::vector<std::size_t> idx;
  std::vector<double> t, lt, lE;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const auto& row = log.rows[i];
    if (row.t > 0.0 && row.E > options.E_floor * R) {
      idx.push_back(i);
      t.push_back(row.t);
      lt.push_back(std::log(row.t));
      lE.push_back(std::log(row.E));
    }
  }
  const std::size_t n = idx.size();
  const std::size_t m = options.min_samples;
  if (n < m) {
    fit.note = "NoExponentialWindow";
    return fit;
  }

  std::size_t exp_begin = n;
  LineFit exp_fit;
  for (std::size_t b = n - m + 1; b-- > 0;) {
    const LineFit f = fit_line(t, lE, b, n);
    if (!(f.r2 >= options.r2_min && f.slope < 0.0)) break;
    exp_begin = b;
    exp_fit = f;
  }
  if (exp_begin == n) {
    fit.note = "NoExponentialWindow";
    return fit;
  }
  fit.has_exponential = true;
  fit.exponential = make_window(idx, exp_begin, n, exp_fit);
  fit.exp_rate = -0.5 * exp_fit.slope;
  fit.T1 = t[exp_begin];
  fit.T1_over_R3 = fit.T1 / (R * R * R);

  // Sliding windows [i, j) in ln t ending before the exponential window.
  std::vector<std::size_t> end_of(exp_begin, 0);
  std::vector<bool> in_band(exp_begin, false);
  for (std::size_t i = 0; i < exp_begin; ++i) {
    std::size_t j = i;
    while (j < exp_begin && lt[j] - lt[i] < options.log_t_width) ++j;
    if (j >= exp_begin) break;
    end_of[i] = j + 1;
    if (end_of[i] - i < m) continue;
    const LineFit f = fit_line(lt, lE, i, end_of[i]);
    in_band[i] = f.slope >= options.slope_lo && f.slope <= options.slope_hi;
  }
  std::size_t last = exp_begin;
  for (std::size_t i = exp_begin; i-- > 0;) {
    if (in_band[i]) {
      last = i;
      break;
    }
  }
  if (last == exp_begin) {
    fit.note = "NoAlgebraicWindow";
    return fit;
  }
  std::size_t first = last;
  while (first > 0 && in_band[first - 1]) --first;
  const std::size_t end = end_of[last];
  const LineFit f = fit_line(lt, lE, first, end);
  fit.has_algebraic = true;
  fit.algebraic = make_window(idx, first, end, f);
  fit.alg_slope = f.slope;
  return fit;
}

BarycenterReport barycenter_monitor(const TrajectoryLog& log, double cap) {
  BarycenterReport r;
  r.cap = cap;
  const auto& rows = log.rows;
  if (rows.empty()) return r;
  const double R = log.meta.R;
  const double scale = std::sqrt(rows.front().E * R);
  for (const auto& row : rows) {
    if (scale > 0.0) r.max_ratio = std::max(r.max_ratio, row.bary / scale);
    else if (row.bary > 0.0) r.max_ratio = std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double dt = rows[i + 1].t - rows[i].t;
    const double Dm = 0.5 * (rows[i].D + rows[i + 1].D);
    if (!(dt > 0.0) || !(Dm > 0.0)) continue;
    const double vx = (rows[i + 1].bary_x - rows[i].bary_x) / dt;
    const double vy = (rows[i + 1].bary_y - rows[i].bary_y) / dt;
    r.max_velocity_ratio = std::max(r.max_velocity_ratio, (vx * vx + vy * vy) * kPi * R * R / Dm);
  }
  return r;
}

EmbeddingReport check_improved_embedding(const geometry::GeometryCache& cache, std::span<const double> V, double C) {
  EmbeddingReport r;
  const double h = cache.weight();
  const double kbar = geometry::mean_curvature(cache);
  const auto Vphi = spectral::differentiate_nodes(V, 1);
  double v2 = 0.0, vs2 = 0.0;
  for (int j = 0; j < cache.M; ++j) {
    v2 += h * cache.ell[j] * V[j] * V[j];
    vs2 += h * Vphi[j] * Vphi[j] / cache.ell[j];
    r.kappa_l1 += h * cache.ell[j] * std::abs(cache.kappa[j] - kbar);
  }
  r.ratio = vs2 > 0.0 ? v2 * 4.0 * kbar * kbar / vs2 : 0.0;
  double lattice = 0.0;
  if (cache.domain.is_torus()) lattice = (cache.R / cache.domain.L) * (cache.R / cache.domain.L);
  r.margin = C * (r.kappa_l1 + lattice);
  r.hypothesis = r.kappa_l1 <= 0.2 && r.margin < 1.0;
  r.bound = r.margin < 1.0 ? 1.0 / (1.0 - r.margin) : std::numeric_limits<double>::infinity();
  r.pass = r.hypothesis && r.ratio <= r.bound * (1.0 + 1e-12);
  return r;
}

EmbeddingReport check_improved_embedding(const geometry::GeometryCache& cache, const potential::BieSolve& solve,
                                         double C) {
  return check_improved_embedding(cache, solve.density.values, C);
}

double boundary_control_ratio(const geometry::GeometryCache& cache) {
  const double h = cache.weight();
  const double kbar = geometry::mean_curvature(cache);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < cache.M; ++j) {
    num += h * cache.rho_phi[j] * cache.rho_phi[j];
    const double dk = cache.kappa[j] - kbar;
    den += h * cache.ell[j] * dk * dk;
  }
  const double R3 = cache.R * cache.R * cache.R;
  return den > 0.0 ? num / (R3 * den) : 0.0;
}

}  // namespace msrelax::analysis
