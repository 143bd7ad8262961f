#include "msrelax/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "msrelax/error.hpp"

namespace msrelax::trajectory {
namespace {

struct Column {
  const char* name;
  const char* doc;
};

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = [] {
    std::vector<Column> c = {
        {"step", "accepted step index"},
        {"t", "time, units of length^3"},
        {"dt", "size of the step that produced the row"},
        {"E", "energy gap L(Gamma) - 2 sqrt(pi |Omega|), i.e. L - 2 pi R at |Omega| = pi R^2"},
        {"H", "squared H^-1 distance to the disk B_R(c); nan when skipped"},
        {"D", "dissipation -int kappa V ds"},
        {"bary", "|c(t) - c(0)|"},
        {"bary_x", "barycenter x"},
        {"bary_y", "barycenter y"},
        {"Vs2", "||V_s||^2 on Gamma"},
        {"V2", "||V||^2 on Gamma"},
        {"EED", "E^2 D"},
        {"sup_rho_dev", "sup |rho - R|"},
        {"sup_slope", "sup |rho_phi|"},
        {"area_error", "|Omega|/(pi R^2) - 1 after projection"},
        {"area_drift", "relative area change of the step before projection"},
        {"kappa_l1", "||kappa - kappa_bar||_L1(Gamma)"},
        {"kappa_l2sq", "||kappa - kappa_bar||^2_L2(Gamma)"},
        {"rho_phi_l2sq", "int rho_phi^2 dphi"},
    };
    return c;
  }();
  return cols;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw Error(ErrorKind::IoError, "bad number in trajectory: " + s);
  return v;
}

}  // namespace

namespace {

std::string header_line() {
  std::string s;
  const auto& names = column_names();
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? "," : "") + names[i];
  return s;
}

}  // namespace

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : columns()) n.emplace_back(c.name);
    for (int k = 0; k < kRecordedModes; ++k) n.push_back("amp" + std::to_string(k));
    return n;
  }();
  return names;
}

void write_header(std::ostream& out, const RunMeta& meta) {
  out << "# msrelax trajectory v1\n";
  out << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << meta.config_hash << std::dec
      << std::setfill(' ') << '\n';
  out << std::setprecision(17);
  out << "# seed=" << meta.seed << " N=" << meta.N << " R=" << meta.R << " domain=" << meta.domain;
  if (meta.domain == "torus") out << " L=" << meta.L;
  out << " scheme=" << meta.scheme << " dt_policy=" << meta.dt_policy << '\n';
  for (const auto& c : columns()) out << "# " << c.name << ": " << c.doc << '\n';
  out << "# amp0..amp" << kRecordedModes - 1 << ": |rho_hat_k| = sqrt(a_k^2 + b_k^2)\n";
  out << header_line() << '\n';
}

void write_row(std::ostream& out, const DiagnosticsRecord& r) {
  out << std::setprecision(17);
  out << r.step;
  const double vals[] = {r.t, r.dt, r.E, r.H, r.D, r.bary, r.bary_x, r.bary_y, r.Vs2, r.V2, r.EED,
                         r.sup_rho_dev, r.sup_slope, r.area_error, r.area_drift, r.kappa_l1, r.kappa_l2sq,
                         r.rho_phi_l2sq};
  for (double v : vals) out << ',' << v;
  for (double v : r.mode_amps) out << ',' << v;
  out << '\n';
}

void write(std::ostream& out, const TrajectoryLog& log) {
  write_header(out, log.meta);
  for (const auto& r : log.rows) write_row(out, r);
  out << "# status=" << log.meta.status << '\n';
}

TrajectoryLog read(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  bool have_names = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("config_hash=");
      if (pos != std::string::npos) log.meta.config_hash = std::stoull(line.substr(pos + 12), nullptr, 16);
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "seed") log.meta.seed = std::stoull(val);
        else if (key == "N") log.meta.N = std::stoi(val);
        else if (key == "R") log.meta.R = std::stod(val);
        else if (key == "domain") log.meta.domain = val;
        else if (key == "L") log.meta.L = std::stod(val);
        else if (key == "scheme") log.meta.scheme = val;
        else if (key == "dt_policy") log.meta.dt_policy = val;
        else if (key == "status") log.meta.status = val;
      }
      continue;
    }
    if (!have_names) {
      if (line != header_line())
        throw Error(ErrorKind::IoError, "unexpected trajectory column header");
      have_names = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != column_names().size()) throw Error(ErrorKind::IoError, "wrong field count in trajectory row");
    DiagnosticsRecord r;
    r.step = std::stol(fields[0]);
    double* targets[] = {&r.t, &r.dt, &r.E, &r.H, &r.D, &r.bary, &r.bary_x, &r.bary_y, &r.Vs2, &r.V2, &r.EED,
                         &r.sup_rho_dev, &r.sup_slope, &r.area_error, &r.area_drift, &r.kappa_l1, &r.kappa_l2sq,
                         &r.rho_phi_l2sq};
    std::size_t i = 1;
    for (double* t : targets) *t = parse_double(fields[i++]);
    for (double& a : r.mode_amps) a = parse_double(fields[i++]);
    log.rows.push_back(r);
  }
  if (!have_names) throw Error(ErrorKind::IoError, "trajectory has no column header");
  return log;
}

TrajectoryLog load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read(in);
}

}  // namespace msrelax::trajectory
