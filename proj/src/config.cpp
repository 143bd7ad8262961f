#include "msrelax/config.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "msrelax/error.hpp"

namespace msrelax {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "' expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "key '" + key + "' expects an integer, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  return p.lexically_normal().string();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "domain") {
    if (v != "plane" && v != "torus") throw Error(ErrorKind::ConfigError, "domain must be plane or torus");
    cfg.domain = v;
  } else if (key == "L") {
    cfg.L = to_double(key, v);
  } else if (key == "R") {
    cfg.R = to_double(key, v);
  } else if (key == "N") {
    cfg.N = static_cast<int>(to_long(key, v));
  } else if (key == "modes") {
    cfg.modes.clear();
    for (const auto& s : split_list(v)) {
      const auto dash = s.find('-', 1);
      if (dash != std::string::npos) {
        const long lo = to_long(key, s.substr(0, dash));
        const long hi = to_long(key, s.substr(dash + 1));
        for (long k = lo; k <= hi; ++k) cfg.modes.push_back(static_cast<int>(k));
      } else {
        cfg.modes.push_back(static_cast<int>(to_long(key, s)));
      }
    }
  } else if (key == "amps") {
    cfg.amps.clear();
    for (const auto& s : split_list(v)) cfg.amps.push_back(to_double(key, s));
  } else if (key == "phases") {
    cfg.phases.clear();
    cfg.random_phases = false;
    if (v == "random") {
      cfg.random_phases = true;
    } else {
      for (const auto& s : split_list(v)) cfg.phases.push_back(to_double(key, s));
    }
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(to_long(key, v));
  } else if (key == "initial") {
    cfg.initial = v;
  } else if (key == "scheme") {
    if (v != "etdrk4" && v != "rk4") throw Error(ErrorKind::ConfigError, "scheme must be etdrk4 or rk4");
    cfg.scheme = v;
  } else if (key == "dt0") {
    cfg.dt0 = to_double(key, v);
  } else if (key == "dt_max") {
    cfg.dt_max = to_double(key, v);
  } else if (key == "c_cfl") {
    cfg.c_cfl = to_double(key, v);
  } else if (key == "c_acc") {
    cfg.c_acc = to_double(key, v);
  } else if (key == "t_end") {
    cfg.t_end = to_double(key, v);
  } else if (key == "E_stop") {
    cfg.E_stop = to_double(key, v);
  } else if (key == "max_steps") {
    cfg.max_steps = to_long(key, v);
  } else if (key == "k_out") {
    cfg.k_out = static_cast<int>(to_long(key, v));
  } else if (key == "k_rec") {
    cfg.k_rec = static_cast<int>(to_long(key, v));
  } else if (key == "k_H") {
    cfg.k_H = static_cast<int>(to_long(key, v));
  } else if (key == "grid") {
    cfg.grid = static_cast<int>(to_long(key, v));
  } else if (key == "filter") {
    cfg.filter = to_double(key, v);
  } else if (key == "delta") {
    cfg.delta = to_double(key, v);
  } else if (key == "output_dir") {
    cfg.output_dir = v;
  } else if (key == "trajectory") {
    cfg.trajectory = v;
  } else if (key == "events") {
    cfg.events = v;
  } else {
    throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
  }
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigError, m); };
  if (!(cfg.R > 0.0)) fail("R must be positive");
  if (cfg.N < 16 || (cfg.N & (cfg.N - 1)) != 0) fail("N must be a power of two >= 16");
  if (cfg.domain == "torus" && !(cfg.L > 0.0)) fail("torus domain needs L > 0");
  for (int k : cfg.modes)
    if (k < 1 || k >= cfg.N) fail("modes must lie in [1, N-1]");
  if (!cfg.modes.empty() && cfg.initial.empty()) {
    if (cfg.amps.size() != 1 && cfg.amps.size() != cfg.modes.size()) fail("amps must have one entry or one per mode");
    if (!cfg.phases.empty() && cfg.phases.size() != cfg.modes.size()) fail("phases must have one entry per mode");
  }
  if (!(cfg.t_end >= 0.0)) fail("t_end must be non-negative");
  if (cfg.dt0 < 0.0 || cfg.dt_max < 0.0) fail("step sizes must be non-negative");
  if (!(cfg.c_cfl > 0.0) || !(cfg.c_acc > 0.0)) fail("c_cfl and c_acc must be positive");
  if (cfg.k_out < 1 || cfg.k_rec < 1 || cfg.k_H < 0) fail("k_out, k_rec must be >= 1 and k_H >= 0");
  if (cfg.grid < 8 || cfg.grid % 2 != 0) fail("grid must be even and >= 8");
  if (cfg.filter < 0.0) fail("filter strength must be non-negative");
  if (cfg.max_steps < 1) fail("max_steps must be positive");
}

std::string RunConfig::trajectory_path() const { return resolve(output_dir, trajectory); }
std::string RunConfig::events_path() const { return resolve(output_dir, events); }

std::string RunConfig::canonical() const {
  std::ostringstream o;
  o << std::setprecision(17);
  auto list = [&](const auto& v) {
    for (std::size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << v[i];
  };
  o << "R=" << R << ";N=" << N << ";domain=" << domain << ";L=" << L << ";modes=";
  list(modes);
  o << ";amps=";
  list(amps);
  o << ";phases=";
  if (random_phases) o << "random";
  else list(phases);
  o << ";seed=" << seed << ";initial=" << initial << ";scheme=" << scheme << ";dt0=" << dt0 << ";dt_max=" << dt_max
    << ";c_cfl=" << c_cfl << ";c_acc=" << c_acc << ";t_end=" << t_end << ";E_stop=" << E_stop
    << ";max_steps=" << max_steps << ";k_out=" << k_out << ";k_rec=" << k_rec << ";k_H=" << k_H << ";grid=" << grid
    << ";filter=" << filter << ";delta=" << delta;
  return o.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.output_dir = resolve(base_dir, cfg.output_dir);
  cfg.initial = resolve(base_dir, cfg.initial);
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path);
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(in, dir.empty() ? "." : dir);
}

}  // namespace msrelax
