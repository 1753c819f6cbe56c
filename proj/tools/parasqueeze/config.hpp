#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "parasqueeze/model.hpp"

namespace parasqueeze::cli {

// Raised for malformed config files, unknown keys, and values that fail
// the physical validation of the nested types. Mapped to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully resolved run configuration: library defaults overlaid with the
// key-value file. Only the blocks a command registers are accepted; any
// other key in the file is rejected.
struct RunConfig {
  // The resonator defaults are the standard demonstration system (Q = 1000
  // with unity feedback); the library's own zero-damping default would fail
  // validation, and a bare `parasqueeze <cmd>` should produce something.
  ResonatorParams resonator{1.0, 1e-3, 0.0, 1.0, 1.0, 100.0};
  DriveSignal drive;
  NoiseSpec noise;
  StateVector initial{0.01, 0.0, 0.0};

  // threshold scan over omega
  double scan_omega_min = 0.995;
  double scan_omega_max = 1.005;
  int scan_points = 11;
  double scan_bracket_lo = 5e-4;
  double scan_bracket_hi = 5e-3;
  int scan_steps = 2048;

  // pump sweeps (multipliers, squeeze)
  double sweep_fp_min = -0.043;
  double sweep_fp_max = 0.0021;
  int sweep_points = 100;
  int sweep_steps = 2048;

  // transient integration
  double time_t_end = 2000.0;
  double time_dt = 0.0;  // 0 selects the integrator default
  int time_stride = 4;
  double spectrum_skip_fraction = 0.5;

  // phase-gain curves; the time-domain measurement is opt-in because it
  // needs a nonzero probe amplitude (drive.fs) to have anything to measure
  int curve_points = 720;
  bool measure_enabled = false;
  double measure_settle_time = -1.0;  // <0 selects the estimator default
  double measure_dt = 0.0;
  double measure_span = 0.0;

  // spectral band
  double band_nu_min = 0.97;
  double band_nu_max = 1.03;
  int band_points = 601;
};

// Parses `path` for `command`, starting from defaults. Returns the config
// together with the resolved key-value echo (sorted by key) that output
// files embed. Throws ConfigError on any problem.
struct LoadedConfig {
  RunConfig values;
  std::map<std::string, std::string> resolved;
};
LoadedConfig load_config(const std::string& path, const std::string& command);

// The resolved echo of the built-in defaults, for commands run without a
// config file.
LoadedConfig default_config(const std::string& command);

}  // namespace parasqueeze::cli
