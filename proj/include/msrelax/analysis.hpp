#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msrelax/evolution.hpp"
#include "msrelax/geometry.hpp"
#include "msrelax/potential.hpp"
#include "msrelax/trajectory.hpp"

// Diagnostics of a flow state and the checks run over trajectory logs.
// Inequalities whose constants are unknown are monitors that report the
// observed constant; the hard checks expose require(), which throws.
namespace msrelax::analysis {

struct RecordContext {
  double dt = 0.0;
  double area_drift = 0.0;
  geometry::Vec2 c0 = geometry::Vec2::Zero();  // reference barycenter for `bary`
  bool with_H = true;
  int H_grid = 1024;
};

DiagnosticsRecord record(const evolution::FlowState& state, const geometry::GeometryCache& cache,
                         const potential::BieSolve& solve, const RecordContext& ctx = {});

struct FugledeResult {
  double deficit = 0.0;  // (L - 2 pi) / (2 pi) after rescaling to unit radius
  double lower = 0.0;    // (1/10)(||u||^2 + ||u_phi||^2)
  double upper = 0.0;    // (3/5) ||u_phi||^2
  double sup_u = 0.0;
  double sup_u_phi = 0.0;
  bool hypotheses = false;  // sup|u| <= 3/40 and sup|u_phi| <= 1/2
  bool pass = false;        // hypotheses hold and lower <= deficit <= upper
};

// The curve is recentred at its bulk barycenter and rescaled to enclose area
// pi; u = rho - 1 and the norms are averages over the circle (measure dphi/2pi).
FugledeResult check_fuglede(const geometry::RadialCurve& curve);

// Random radial curve with modes 2..k_max (k_max drawn in [2, 16]) scaled so
// that both sup|rho - R| and sup|rho_phi| are at most delta R, then recentred
// and area projected. Retries until admissibility_report passes.
geometry::RadialCurve random_admissible(std::mt19937_64& rng, double delta, int n_modes = 64, double R = 1.0);

struct FugledeSuite {
  long trials = 0;
  long passed = 0;
  long hypothesis_failures = 0;
  double max_deficit_over_upper = 0.0;
  double min_deficit_over_lower = 0.0;
};

// Trials are split across `threads` workers; trial i uses the generator
// seeded with seed + i, so the result does not depend on the worker count.
FugledeSuite fuglede_suite(long trials, std::uint64_t seed, double delta = 0.05, int threads = 1);

struct EedReport {
  long rows_checked = 0;
  double max_E_over_R3D = 0.0;
  double last_E_over_R3D = 0.0;
  double max_E_over_sqrtHD = 0.0;
  long H_rows = 0;
  bool finite = true;
  bool monotone = true;
  double worst_increase = 0.0;  // largest E^2 D increase between rows, relative to the first row
  bool pass() const { return finite && monotone; }
  void require() const;  // MonotoneViolation
};

EedReport check_eed(const TrajectoryLog& log, double slack = 1e-9);

struct DifferentialReport {
  long intervals = 0;
  double max_balance_error = 0.0;  // |dE/dt + D_mid| / D_mid over interior intervals
  double tolerance = 1e-3;
  double max_dH_ratio = 0.0;       // |dH/dt| / sqrt(H D) between rows carrying H
  long H_intervals = 0;
  double max_dD_ratio = 0.0;       // (dD/dt + ||V_s||^2)_+ / (E D^3 + D^{5/2})
  long dD_positive = 0;            // intervals with dD/dt + 2||V_s||^2 > 0
  bool pass() const { return max_balance_error <= tolerance; }
  void require() const;  // EnergyBalanceFail
};

// Midpoint differences between consecutive rows. Intervals touching the
// first or the last row, or with D below d_floor times the largest D, are
// excluded from the energy balance.
DifferentialReport check_differential(const TrajectoryLog& log, double tolerance = 1e-3, double d_floor = 1e-10);

struct Window {
  std::size_t begin = 0;  // row indices, end exclusive
  std::size_t end = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t size() const { return end - begin; }
};

struct RegimeFitOptions {
  double slope_lo = -1.3;
  double slope_hi = -0.7;
  double log_t_width = 1.0;  // width in ln t of the sliding algebraic windows
  double r2_min = 0.999;
  std::size_t min_samples = 10;
  double E_floor = 1e-14;    // rows with E below E_floor R are ignored
};

struct RegimeFit {
  bool has_algebraic = false;
  bool has_exponential = false;
  Window algebraic;    // ln E against ln t
  Window exponential;  // ln E against t
  double alg_slope = 0.0;
  double exp_rate = 0.0;  // amplitude rate -(1/2) d ln E / dt
  double T1 = 0.0;        // start of the exponential window
  double T1_over_R3 = 0.0;
  std::string note;       // NoAlgebraicWindow / NoExponentialWindow when missing
};

// The exponential window is the longest tail of the log on which ln E is
// linear in t with R^2 >= r2_min. The algebraic window is the latest run of
// overlapping sliding windows before it whose ln E / ln t slope lies in
// [slope_lo, slope_hi]; alg_slope is the least-squares slope over that run.
RegimeFit regime_fit(const TrajectoryLog& log, const RegimeFitOptions& options = {});

struct BarycenterReport {
  double max_ratio = 0.0;  // max_t |c(t) - c(0)| / sqrt(E(0) R)
  double cap = 5.0;
  double max_velocity_ratio = 0.0;  // max |c'|^2 pi R^2 / D
  bool pass() const { return max_ratio <= cap; }
};

BarycenterReport barycenter_monitor(const TrajectoryLog& log, double cap = 5.0);

struct EmbeddingReport {
  double ratio = 0.0;     // ||V||^2 4 kappa_bar^2 / ||V_s||^2
  double kappa_l1 = 0.0;  // ||kappa - kappa_bar||_{L^1(Gamma)}
  double margin = 0.0;    // C (kappa_l1 + (R/L)^2 on the torus)
  double bound = 0.0;     // 1 / (1 - margin)
  bool hypothesis = false;  // kappa_l1 <= 1/5 and margin < 1
  bool pass = false;
};

EmbeddingReport check_improved_embedding(const geometry::GeometryCache& cache, std::span<const double> V,
                                         double C = 2.0);
EmbeddingReport check_improved_embedding(const geometry::GeometryCache& cache, const potential::BieSolve& solve,
                                         double C = 2.0);

// int rho_phi^2 dphi / (R^3 ||kappa - kappa_bar||^2_{L^2(Gamma)}), scale free.
double boundary_control_ratio(const geometry::GeometryCache& cache);

}  // namespace msrelax::analysis
