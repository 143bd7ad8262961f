#pragma once

#include <functional>
#include <string>
#include <vector>

#include "msrelax/config.hpp"
#include "msrelax/geometry.hpp"
#include "msrelax/potential.hpp"
#include "msrelax/trajectory.hpp"

// Mullins-Sekerka flow of a radial curve in the frozen-pole gauge
//   rho_t = V ell / rho,
// with the pole moved to the bulk barycenter every few steps and the zero mode
// adjusted after every step so the enclosed area stays pi R^2.
namespace msrelax::evolution {

struct FlowState {
  geometry::RadialCurve curve;
  double t = 0.0;
  long step_count = 0;
  double last_dt = 0.0;
};

// Node values of d rho / dt for the current state.
std::vector<double> rhs(const FlowState& state, const potential::Kernel& kernel);

// Same, from an existing cache and solve.
std::vector<double> rhs_nodes(const geometry::GeometryCache& cache, const potential::BieSolve& solve);

// Linear rate of mode k about the disk of radius R: -2k(k^2 - 1)/R^3.
double linear_rate(int k, double R);

enum class Scheme { Etdrk4, Rk4 };
Scheme parse_scheme(const std::string& name);

struct StepOptions {
  Scheme scheme = Scheme::Etdrk4;
  double filter = 0.0;          // exponential filter strength, order 16; 0 = off
  double max_area_drift = 1e-5;
};

struct StepResult {
  FlowState state;
  double area_drift = 0.0;  // relative area change before projection
};

// One step of size dt followed by the optional filter and the area projection.
// `rhs0` may carry the node values of rhs(state) to skip the first solve.
// Throws StepRejected when the drift is too large or rho leaves (0, inf).
StepResult step(const FlowState& state, double dt, const potential::Kernel& kernel, const StepOptions& options = {},
                const std::vector<double>* rhs0 = nullptr);

// Moves the pole to the bulk barycenter and re-derives rho about it.
// Throws RecenterFail if the shift is 0.2 R or more or a ray misses.
FlowState recenter(const FlowState& state);

// Largest step the policy allows: the explicit-remainder stability limit and
// the accuracy limits c_acc E / D and c_acc D / (2 ||V_s||^2).
struct StepPolicy {
  Scheme scheme = Scheme::Etdrk4;
  double c_cfl = 0.5;
  double c_acc = 0.02;
  double dt_max = 0.0;  // 0 = no extra cap
};
double policy_dt(const geometry::GeometryCache& cache, double E, double D, double Vs2, const StepPolicy& policy);

// Initial curve from the run configuration: either the `initial` file or
// R (1 + sum amp_i cos(k_i phi - phase_i)), area projected and recentered.
FlowState initial_state(const RunConfig& config);

struct RunResult {
  TrajectoryLog log;
  FlowState final_state;
  std::string status;  // finished | e_stop | max_steps | step_rejected | solver_failure | recenter_fail
  long rejections = 0;
  long recenters = 0;
  double max_area_drift = 0.0;
};

struct RunHooks {
  // Called after every accepted row; returning false stops the run.
  std::function<bool(const DiagnosticsRecord&)> on_record;
  bool write_files = true;
};

// Integrates to t_end (or E < E_stop), writing the trajectory CSV and the
// JSONL event log when write_files is set. Solver failures end the run with a
// labeled status; the partial log is kept.
RunResult run(const RunConfig& config, const RunHooks& hooks = {});

}  // namespace msrelax::evolution
