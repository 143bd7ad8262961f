#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace msrelax {

inline constexpr int kRecordedModes = 16;

// One diagnostics row. H is NaN on rows where it was not evaluated.
struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;        // step size that led to this row (0 for the first)
  double E = 0.0;         // L(Gamma) - 2 pi R
  double H = 0.0;         // squared H^{-1} distance to B_R(c)
  double D = 0.0;         // -int kappa V ds
  double bary = 0.0;      // |c(t) - c(0)|
  double bary_x = 0.0;    // c(t), absolute coordinates
  double bary_y = 0.0;
  double Vs2 = 0.0;       // ||dV/ds||^2_{L^2(Gamma)}
  double V2 = 0.0;        // ||V||^2_{L^2(Gamma)}
  double EED = 0.0;       // E^2 D
  double sup_rho_dev = 0.0;
  double sup_slope = 0.0;
  double area_error = 0.0;  // |Omega| / (pi R^2) - 1 after projection
  double area_drift = 0.0;  // relative area change of the last step before projection
  double kappa_l1 = 0.0;    // ||kappa - kappa_bar||_{L^1(Gamma)}
  double kappa_l2sq = 0.0;  // ||kappa - kappa_bar||^2_{L^2(Gamma)}
  double rho_phi_l2sq = 0.0;  // int rho_phi^2 dphi
  std::array<double, kRecordedModes> mode_amps{};  // |rho_hat_k|, k = 0..15
};

struct RunMeta {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  int N = 0;
  double R = 1.0;
  std::string domain = "plane";
  double L = 0.0;
  std::string scheme;
  std::string dt_policy;
  std::string status = "running";
};

struct TrajectoryLog {
  RunMeta meta;
  std::vector<DiagnosticsRecord> rows;
};

namespace trajectory {

// CSV with '#' header comments describing the columns and run metadata,
// one header line of column names, then rows at 17 significant digits.
void write_header(std::ostream& out, const RunMeta& meta);
void write_row(std::ostream& out, const DiagnosticsRecord& r);
void write(std::ostream& out, const TrajectoryLog& log);
TrajectoryLog read(std::istream& in);
TrajectoryLog load(const std::string& path);

const std::vector<std::string>& column_names();

}  // namespace trajectory
}  // namespace msrelax
