#include "msrelax/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

#include "msrelax/analysis.hpp"
#include "msrelax/curve_io.hpp"
#include "msrelax/error.hpp"

namespace msrelax::evolution {
namespace {

constexpr double kPi = 3.14159265358979323846;

using geometry::RadialCurve;
using spectral::RealSeries;

geometry::CacheOptions flow_cache_options() {
  geometry::CacheOptions o;
  o.policy = geometry::ResolutionPolicy::Warn;
  return o;
}

// Coefficients packed as (a_0..a_{N-1}, b_0..b_{N-1}).
std::vector<double> pack(const RealSeries& s) {
  std::vector<double> u(s.a);
  u.insert(u.end(), s.b.begin(), s.b.end());
  return u;
}

RealSeries unpack(const std::vector<double>& u) {
  const int n = static_cast<int>(u.size() / 2);
  RealSeries s(n);
  std::copy(u.begin(), u.begin() + n, s.a.begin());
  std::copy(u.begin() + n, u.end(), s.b.begin());
  return s;
}

RadialCurve with_coeffs(const RadialCurve& like, const std::vector<double>& u) {
  RadialCurve c = like;
  c.rho_hat = unpack(u);
  return c;
}

double area_of(const RealSeries& s) {
  double osc = 0.0;
  for (int k = 1; k < s.size(); ++k) osc += s.a[k] * s.a[k] + s.b[k] * s.b[k];
  return kPi * (s.a[0] * s.a[0] + 0.5 * osc);
}

// Full right-hand side in coefficient space; StepRejected if rho <= 0.
std::vector<double> rhs_coeffs(const RadialCurve& like, const std::vector<double>& u, const potential::Kernel& kernel) {
  const RadialCurve c = with_coeffs(like, u);
  geometry::GeometryCache cache;
  try {
    cache = geometry::build_cache(c, flow_cache_options());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonPositiveRadius) throw Error(ErrorKind::StepRejected, "rho left (0, inf) at a stage");
    throw;
  }
  const auto solve = potential::solve_ms(cache, kernel);
  return pack(spectral::analyze(rhs_nodes(cache, solve), c.modes()));
}

std::vector<double> linear_diag(int n, double R) {
  std::vector<double> L(2 * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) L[k] = L[n + k] = linear_rate(k, R);
  return L;
}

struct EtdCoeffs {
  std::vector<double> E, E2, Q, f1, f2, f3;
};

// Contour means avoid the cancellation of the phi-functions near c = 0.
EtdCoeffs etd_coeffs(const std::vector<double>& L, double h) {
  constexpr int kPoints = 32;
  using cplx = std::complex<double>;
  EtdCoeffs c;
  for (double l : L) {
    const double hc = h * l;
    cplx q = 0.0, a = 0.0, b = 0.0, g = 0.0;
    for (int j = 0; j < kPoints; ++j) {
      const cplx z = hc + std::polar(1.0, kPi * (j + 0.5) / kPoints * 2.0);
      const cplx ez = std::exp(z);
      const cplx z3 = z * z * z;
      q += (std::exp(z / 2.0) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (z - 2.0)) / z3;
      g += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    c.E.push_back(std::exp(hc));
    c.E2.push_back(std::exp(hc / 2.0));
    c.Q.push_back(h * q.real() / kPoints);
    c.f1.push_back(h * a.real() / kPoints);
    c.f2.push_back(h * b.real() / kPoints);
    c.f3.push_back(h * g.real() / kPoints);
  }
  return c;
}

std::vector<double> etdrk4(const RadialCurve& curve, double h, const potential::Kernel& kernel,
                           const std::vector<double>& f0) {
  const int n = curve.modes();
  const auto L = linear_diag(n, curve.R);
  const auto c = etd_coeffs(L, h);
  const auto u = pack(curve.rho_hat);
  const std::size_t m = u.size();
  auto nonlinear = [&](const std::vector<double>& v, const std::vector<double>& f) {
    std::vector<double> N(m);
    for (std::size_t i = 0; i < m; ++i) N[i] = f[i] - L[i] * v[i];
    return N;
  };
  const auto Nu = nonlinear(u, f0);
  std::vector<double> a(m), b(m), cc(m), out(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = c.E2[i] * u[i] + c.Q[i] * Nu[i];
  const auto Na = nonlinear(a, rhs_coeffs(curve, a, kernel));
  for (std::size_t i = 0; i < m; ++i) b[i] = c.E2[i] * u[i] + c.Q[i] * Na[i];
  const auto Nb = nonlinear(b, rhs_coeffs(curve, b, kernel));
  for (std::size_t i = 0; i < m; ++i) cc[i] = c.E2[i] * a[i] + c.Q[i] * (2.0 * Nb[i] - Nu[i]);
  const auto Nc = nonlinear(cc, rhs_coeffs(curve, cc, kernel));
  for (std::size_t i = 0; i < m; ++i)
    out[i] = c.E[i] * u[i] + c.f1[i] * Nu[i] + 2.0 * c.f2[i] * (Na[i] + Nb[i]) + c.f3[i] * Nc[i];
  return out;
}

std::vector<double> rk4(const RadialCurve& curve, double h, const potential::Kernel& kernel,
                        const std::vector<double>& k1) {
  const auto u = pack(curve.rho_hat);
  const std::size_t m = u.size();
  auto axpy = [&](double s, const std::vector<double>& k) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = u[i] + s * k[i];
    return v;
  };
  const auto k2 = rhs_coeffs(curve, axpy(h / 2.0, k1), kernel);
  const auto k3 = rhs_coeffs(curve, axpy(h / 2.0, k2), kernel);
  const auto k4 = rhs_coeffs(curve, axpy(h, k3), kernel);
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

double velocity_slope_sq(const geometry::GeometryCache& cache, const potential::BieSolve& solve) {
  const auto Vphi = spectral::differentiate_nodes(solve.density.values, 1);
  double vs = 0.0;
  for (int j = 0; j < cache.M; ++j) vs += Vphi[j] * Vphi[j] / cache.ell[j];
  return cache.weight() * vs;
}

double oscillation_energy(const RealSeries& s) {
  double e = 0.0;
  for (int k = 1; k < s.size(); ++k) e += s.a[k] * s.a[k] + s.b[k] * s.b[k];
  return e;
}

double top_quarter_energy(const RealSeries& s) {
  double e = 0.0;
  for (int k = 3 * s.size() / 4; k < s.size(); ++k) e += s.a[k] * s.a[k] + s.b[k] * s.b[k];
  return e;
}

}  // namespace

double linear_rate(int k, double R) {
  const double kk = static_cast<double>(k);
  return -2.0 * kk * (kk * kk - 1.0) / (R * R * R);
}

Scheme parse_scheme(const std::string& name) {
  if (name == "etdrk4") return Scheme::Etdrk4;
  if (name == "rk4") return Scheme::Rk4;
  throw Error(ErrorKind::ConfigError, "unknown scheme '" + name + "'");
}

std::vector<double> rhs_nodes(const geometry::GeometryCache& cache, const potential::BieSolve& solve) {
  std::vector<double> r(cache.M);
  for (int j = 0; j < cache.M; ++j) r[j] = solve.density.values[j] * cache.ell[j] / cache.rho[j];
  return r;
}

std::vector<double> rhs(const FlowState& state, const potential::Kernel& kernel) {
  const auto cache = geometry::build_cache(state.curve, flow_cache_options());
  return rhs_nodes(cache, potential::solve_ms(cache, kernel));
}

StepResult step(const FlowState& state, double dt, const potential::Kernel& kernel, const StepOptions& options,
                const std::vector<double>* rhs0) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
  const RadialCurve& curve = state.curve;
  const int n = curve.modes();
  std::vector<double> f0 = rhs0 ? pack(spectral::analyze(*rhs0, n)) : rhs_coeffs(curve, pack(curve.rho_hat), kernel);

  std::vector<double> u = options.scheme == Scheme::Etdrk4 ? etdrk4(curve, dt, kernel, f0) : rk4(curve, dt, kernel, f0);
  RealSeries s = unpack(u);
  if (options.filter > 0.0) {
    for (int k = 1; k < n; ++k) {
      const double sigma = std::exp(-options.filter * std::pow(static_cast<double>(k) / n, 16));
      s.a[k] *= sigma;
      s.b[k] *= sigma;
    }
  }

  const double disk = kPi * curve.R * curve.R;
  StepResult r;
  r.area_drift = std::abs(area_of(s) - area_of(curve.rho_hat)) / disk;
  if (!(r.area_drift <= options.max_area_drift))
    throw Error(ErrorKind::StepRejected, "area drift " + std::to_string(r.area_drift) + " before projection");

  RadialCurve next = curve;
  next.rho_hat = s;
  try {
    next = geometry::project_area(next);
    next.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::StepRejected, e.what());
  }
  r.state = FlowState{next, state.t + dt, state.step_count + 1, dt};
  return r;
}

FlowState recenter(const FlowState& state) {
  geometry::CacheOptions opts;
  opts.policy = geometry::ResolutionPolicy::Ignore;
  const auto cache = geometry::build_cache(state.curve, opts);
  const geometry::Vec2 c = geometry::barycenter_bulk(cache);
  const double shift = (c - state.curve.pole).norm();
  if (!(shift < 0.2 * state.curve.R))
    throw Error(ErrorKind::RecenterFail, "barycenter is " + std::to_string(shift / state.curve.R) + " R from the pole");
  if (shift == 0.0) return state;
  const auto theta = spectral::nodes(state.curve.node_count());
  const auto rho = geometry::radial_function_about(state.curve, c, theta);
  FlowState out = state;
  out.curve.pole = c;
  out.curve.rho_hat = spectral::analyze(rho, state.curve.modes());
  out.curve = geometry::project_area(out.curve);
  return out;
}

double policy_dt(const geometry::GeometryCache& cache, double E, double D, double Vs2, const StepPolicy& policy) {
  const int n = cache.rho_hat.size();
  const double lmax = std::abs(linear_rate(n - 1, cache.R));
  double dt = std::numeric_limits<double>::infinity();
  if (policy.scheme == Scheme::Rk4) {
    dt = policy.c_cfl * 2.78 / lmax;
  } else {
    // The exponential integrator damps the stiff modes exactly; only the
    // explicit remainder, of relative size ~ |R^3/ell^3 - 1|, limits the step.
    double s = 0.0;
    const double R3 = cache.R * cache.R * cache.R;
    for (double l : cache.ell) s = std::max(s, std::abs(R3 / (l * l * l) - 1.0));
    if (2.0 * s > policy.c_cfl) dt = policy.c_cfl * 2.78 / (lmax * 2.0 * s);
  }
  if (E > 0.0 && D > 0.0) dt = std::min(dt, policy.c_acc * E / D);
  // dD/dt = -2 ||V_s||^2 to leading order
  if (D > 0.0 && Vs2 > 0.0) dt = std::min(dt, policy.c_acc * D / (2.0 * Vs2));
  if (policy.dt_max > 0.0) dt = std::min(dt, policy.dt_max);
  if (!std::isfinite(dt)) dt = 0.1 * cache.R * cache.R * cache.R;  // at equilibrium nothing limits the step
  return dt;
}

FlowState initial_state(const RunConfig& config) {
  geometry::Domain domain = config.domain == "torus" ? geometry::Domain::torus(config.L) : geometry::Domain::plane();
  RadialCurve curve;
  if (!config.initial.empty()) {
    curve = curve_io::load(config.initial);
    curve.domain = domain;
  } else {
    curve = geometry::circle(config.R, config.N, geometry::Vec2::Zero(), domain);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
    for (std::size_t i = 0; i < config.modes.size(); ++i) {
      const int k = config.modes[i];
      const double amp = (config.amps.size() == 1 ? config.amps[0] : config.amps[i]) * config.R;
      double phase = 0.0;
      if (config.random_phases) phase = uniform(rng);
      else if (!config.phases.empty()) phase = config.phases[i];
      curve.rho_hat.a[k] += amp * std::cos(phase);
      curve.rho_hat.b[k] += amp * std::sin(phase);
    }
  }
  curve = geometry::project_area(curve);
  curve.validate();
  return recenter(FlowState{curve, 0.0, 0, 0.0});
}

RunResult run(const RunConfig& config, const RunHooks& hooks) {
  validate_config(config);
  const auto kernel = potential::kernel_for(config.domain == "torus" ? geometry::Domain::torus(config.L)
                                                                     : geometry::Domain::plane());
  StepOptions sopts;
  sopts.scheme = parse_scheme(config.scheme);
  sopts.filter = config.filter;
  StepPolicy policy{sopts.scheme, config.c_cfl, config.c_acc, config.dt_max};

  RunResult result;
  auto& meta = result.log.meta;
  meta.config_hash = config.hash();
  meta.seed = config.seed;
  meta.R = config.R;
  meta.domain = config.domain;
  meta.L = config.L;
  meta.scheme = config.scheme;
  meta.dt_policy = "cfl=" + std::to_string(config.c_cfl) + ";acc=" + std::to_string(config.c_acc);

  std::ofstream traj, events;
  if (hooks.write_files) {
    std::filesystem::create_directories(config.output_dir);
    traj.open(config.trajectory_path());
    events.open(config.events_path());
    if (!traj || !events) throw Error(ErrorKind::IoError, "cannot open outputs in " + config.output_dir);
  }
  auto emit = [&](nlohmann::json ev) {
    if (hooks.write_files) events << ev.dump() << '\n' << std::flush;
  };

  FlowState state = initial_state(config);
  meta.N = state.curve.modes();
  meta.R = state.curve.R;
  if (hooks.write_files) {
    trajectory::write_header(traj, meta);
    traj.flush();
  }

  const geometry::Vec2 c0 = geometry::barycenter_bulk(geometry::build_cache(state.curve, flow_cache_options()));
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx", static_cast<unsigned long long>(meta.config_hash));
  emit({{"event", "start"}, {"config_hash", hash_hex}, {"N", meta.N}, {"R", meta.R}, {"domain", meta.domain},
        {"scheme", meta.scheme}, {"pole", {state.curve.pole.x(), state.curve.pole.y()}}});

  const double E_scale_tol = 1e-12;
  double dt_factor = 1.0;
  int streak = 0;
  long rows = 0;
  double last_drift = 0.0;
  double last_dt = 0.0;
  std::string status = "running";
  bool warned_resolution = false;

  try {
    while (true) {
      const auto cache = geometry::build_cache(state.curve, flow_cache_options());
      if (cache.resolution_warning && !warned_resolution) {
        warned_resolution = true;
        emit({{"event", "unresolved"}, {"step", state.step_count}, {"t", state.t},
              {"ratio", state.curve.resolution_ratio()}});
      }
      const auto solve = potential::solve_ms(cache, kernel);
      const double E = geometry::isoperimetric_deficit(cache);
      const double D = potential::dissipation(cache, solve);

      std::string stop;
      if (state.t >= config.t_end * (1.0 - 1e-14)) stop = "finished";
      else if (config.E_stop > 0.0 && E < config.E_stop) stop = "e_stop";
      else if (state.step_count >= config.max_steps) stop = "max_steps";

      if (state.step_count % config.k_out == 0 || !stop.empty()) {
        analysis::RecordContext ctx;
        ctx.dt = last_dt;
        ctx.area_drift = last_drift;
        ctx.c0 = c0;
        ctx.with_H = config.k_H > 0 && rows % config.k_H == 0;
        ctx.H_grid = config.grid;
        const auto rec = analysis::record(state, cache, solve, ctx);
        result.log.rows.push_back(rec);
        ++rows;
        if (hooks.write_files) trajectory::write_row(traj, rec);
        if (hooks.on_record && !hooks.on_record(rec)) stop = "stopped";
      }
      if (!stop.empty()) {
        status = stop;
        break;
      }

      const auto f0 = rhs_nodes(cache, solve);
      const double dt_policy = policy_dt(cache, E, D, velocity_slope_sq(cache, solve), policy);
      double dt = std::min(dt_policy * dt_factor, config.t_end - state.t);
      if (config.dt0 > 0.0 && state.step_count == 0) dt = std::min(dt, config.dt0);
      const double top0 = top_quarter_energy(state.curve.rho_hat);
      const double floor = std::max(1e-24 * state.curve.R * state.curve.R, 1e-10 * oscillation_energy(state.curve.rho_hat));
      int rejected_here = 0;
      while (true) {
        std::string why;
        try {
          auto r = step(state, dt, kernel, sopts, &f0);
          const auto next_cache = geometry::build_cache(r.state.curve, flow_cache_options());
          const double E_next = geometry::isoperimetric_deficit(next_cache);
          if (E_next > E * (1.0 + E_scale_tol) + 1e-20 * state.curve.R) {
            why = "energy increased";
          } else if (top_quarter_energy(r.state.curve.rho_hat) > 2.0 * std::max(top0, floor)) {
            why = "high modes grew";
          } else {
            last_drift = r.area_drift;
            result.max_area_drift = std::max(result.max_area_drift, r.area_drift);
            last_dt = dt;
            state = r.state;
            break;
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::StepRejected) throw;
          why = e.what();
        }
        ++result.rejections;
        ++rejected_here;
        emit({{"event", "reject"}, {"step", state.step_count}, {"t", state.t}, {"dt", dt}, {"reason", why}});
        if (rejected_here > 40) throw Error(ErrorKind::StepRejected, "rejection streak");
        dt *= 0.5;
        dt_factor *= 0.5;
        streak = 0;
      }
      if (rejected_here == 0 && ++streak >= 5 && dt_factor < 1.0) {
        dt_factor = std::min(1.0, 2.0 * dt_factor);
        streak = 0;
      }
      if (state.step_count % config.k_rec == 0) {
        const geometry::Vec2 before = state.curve.pole;
        state = recenter(state);
        ++result.recenters;
        emit({{"event", "recenter"}, {"step", state.step_count}, {"t", state.t},
              {"shift", (state.curve.pole - before).norm()}});
      }
    }
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::StepRejected: status = "step_rejected"; break;
      case ErrorKind::RecenterFail: status = "recenter_fail"; break;
      case ErrorKind::SolverSingular:
      case ErrorKind::NegativeDissipation: status = "solver_failure"; break;
      default: status = "error"; break;
    }
    emit({{"event", "halt"}, {"step", state.step_count}, {"t", state.t}, {"reason", e.what()}});
  }

  meta.status = status;
  result.status = status;
  result.final_state = state;
  emit({{"event", "end"}, {"status", status}, {"steps", state.step_count}, {"t", state.t},
        {"rejections", result.rejections}, {"recenters", result.recenters}});
  if (hooks.write_files) traj << "# status=" << status << '\n';
  return result;
}

}  // namespace msrelax::evolution
