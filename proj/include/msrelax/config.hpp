#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace msrelax {

// Flat `key = value` run configuration. Blank lines and '#' comments are
// ignored; unknown keys are rejected.
struct RunConfig {
  std::string domain = "plane";  // plane | torus
  double L = 0.0;                // torus half edge (required for torus)
  double R = 1.0;
  int N = 64;
  std::vector<int> modes;        // initial perturbation modes
  std::vector<double> amps;      // amplitudes in units of R; one value broadcasts
  std::vector<double> phases;    // radians; empty = zero, or random_phases
  bool random_phases = false;
  std::uint64_t seed = 1;
  std::string initial;           // optional .msrc file replacing modes/amps
  std::string scheme = "etdrk4"; // etdrk4 | rk4
  double dt0 = 0.0;              // 0 selects the automatic step
  double dt_max = 0.0;           // 0 = no cap beyond the policy
  double c_cfl = 0.5;
  double c_acc = 0.02;
  double t_end = 1.0;
  double E_stop = 0.0;
  long max_steps = 1000000;
  int k_out = 1;
  int k_rec = 10;
  int k_H = 5;                   // H on every k_H-th record; 0 disables H
  int grid = 1024;               // H grid
  double filter = 0.0;           // exponential filter strength; 0 = off
  double delta = 0.05;           // admissibility level reported in events
  std::string output_dir = ".";
  std::string trajectory = "trajectory.csv";
  std::string events = "run.jsonl";

  std::string trajectory_path() const;
  std::string events_path() const;

  // Canonical text of the physics-relevant keys (output locations excluded).
  std::string canonical() const;
  std::uint64_t hash() const;
};

RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// Applies one `key = value` assignment; throws ConfigError on unknown keys or
// malformed values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Checks cross-key consistency; throws ConfigError.
void validate_config(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace msrelax
