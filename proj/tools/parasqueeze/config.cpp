#include "config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <utility>

namespace parasqueeze::cli {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& raw) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a number");
  }
  if (pos != raw.size())
    throw ConfigError("key '" + key + "': trailing junk in '" + raw + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& raw) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(raw, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as an integer");
  }
  if (pos != raw.size())
    throw ConfigError("key '" + key + "': trailing junk in '" + raw + "'");
  if (v < -1000000000L || v > 1000000000L)
    throw ConfigError("key '" + key + "': integer out of range");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
  if (raw == "1" || raw == "true") return true;
  if (raw == "0" || raw == "false") return false;
  throw ConfigError("key '" + key + "': expected true/false/1/0, got '" + raw + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_int(int v) { return std::to_string(v); }

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

struct KeySpec {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Registry = std::map<std::string, KeySpec>;

// ref is a generic accessor lambda usable on both const and mutable configs.
template <class Ref>
void add_double(Registry& r, const std::string& key, Ref ref) {
  r.emplace(key, KeySpec{
      [key, ref](RunConfig& c, const std::string& raw) { ref(c) = parse_double(key, raw); },
      [ref](const RunConfig& c) { return fmt_double(ref(c)); }});
}

template <class Ref>
void add_int(Registry& r, const std::string& key, Ref ref) {
  r.emplace(key, KeySpec{
      [key, ref](RunConfig& c, const std::string& raw) { ref(c) = parse_int(key, raw); },
      [ref](const RunConfig& c) { return fmt_int(ref(c)); }});
}

template <class Ref>
void add_bool(Registry& r, const std::string& key, Ref ref) {
  r.emplace(key, KeySpec{
      [key, ref](RunConfig& c, const std::string& raw) { ref(c) = parse_bool(key, raw); },
      [ref](const RunConfig& c) { return fmt_bool(ref(c)); }});
}

void add_resonator(Registry& r) {
  add_double(r, "resonator.omega0", [](auto& c) -> auto& { return c.resonator.omega0; });
  add_double(r, "resonator.gamma", [](auto& c) -> auto& { return c.resonator.gamma; });
  add_double(r, "resonator.fp", [](auto& c) -> auto& { return c.resonator.Fp; });
  add_double(r, "resonator.omega", [](auto& c) -> auto& { return c.resonator.omega; });
  add_double(r, "resonator.eta", [](auto& c) -> auto& { return c.resonator.eta; });
  add_double(r, "resonator.tau", [](auto& c) -> auto& { return c.resonator.tau; });
}

void add_drive(Registry& r) {
  add_double(r, "drive.fs", [](auto& c) -> auto& { return c.drive.Fs; });
  add_double(r, "drive.omega_s", [](auto& c) -> auto& { return c.drive.omega_s; });
  add_double(r, "drive.phi0", [](auto& c) -> auto& { return c.drive.phi0; });
}

Registry registry_for(const std::string& command) {
  Registry r;
  if (command == "validate") return r;  // validate takes no config
  add_resonator(r);
  if (command == "threshold") {
    add_double(r, "scan.omega_min", [](auto& c) -> auto& { return c.scan_omega_min; });
    add_double(r, "scan.omega_max", [](auto& c) -> auto& { return c.scan_omega_max; });
    add_int(r, "scan.points", [](auto& c) -> auto& { return c.scan_points; });
    add_double(r, "scan.bracket_lo", [](auto& c) -> auto& { return c.scan_bracket_lo; });
    add_double(r, "scan.bracket_hi", [](auto& c) -> auto& { return c.scan_bracket_hi; });
    add_int(r, "scan.steps", [](auto& c) -> auto& { return c.scan_steps; });
  } else if (command == "multipliers") {
    add_double(r, "sweep.fp_min", [](auto& c) -> auto& { return c.sweep_fp_min; });
    add_double(r, "sweep.fp_max", [](auto& c) -> auto& { return c.sweep_fp_max; });
    add_int(r, "sweep.points", [](auto& c) -> auto& { return c.sweep_points; });
    add_int(r, "sweep.steps", [](auto& c) -> auto& { return c.sweep_steps; });
  } else if (command == "transient") {
    add_drive(r);
    add_double(r, "initial.x", [](auto& c) -> auto& { return c.initial.x; });
    add_double(r, "initial.xdot", [](auto& c) -> auto& { return c.initial.xdot; });
    add_double(r, "initial.z", [](auto& c) -> auto& { return c.initial.z; });
    add_double(r, "time.t_end", [](auto& c) -> auto& { return c.time_t_end; });
    add_double(r, "time.dt", [](auto& c) -> auto& { return c.time_dt; });
    add_int(r, "time.stride", [](auto& c) -> auto& { return c.time_stride; });
    add_double(r, "spectrum.skip_fraction",
               [](auto& c) -> auto& { return c.spectrum_skip_fraction; });
  } else if (command == "gain") {
    add_drive(r);
    add_int(r, "curve.points", [](auto& c) -> auto& { return c.curve_points; });
    add_bool(r, "measure.enabled", [](auto& c) -> auto& { return c.measure_enabled; });
    add_double(r, "measure.settle_time",
               [](auto& c) -> auto& { return c.measure_settle_time; });
    add_double(r, "measure.dt", [](auto& c) -> auto& { return c.measure_dt; });
    add_double(r, "measure.span", [](auto& c) -> auto& { return c.measure_span; });
  } else if (command == "nsd") {
    add_double(r, "noise.d", [](auto& c) -> auto& { return c.noise.D; });
    add_double(r, "band.nu_min", [](auto& c) -> auto& { return c.band_nu_min; });
    add_double(r, "band.nu_max", [](auto& c) -> auto& { return c.band_nu_max; });
    add_int(r, "band.points", [](auto& c) -> auto& { return c.band_points; });
  } else if (command == "squeeze") {
    add_double(r, "noise.d", [](auto& c) -> auto& { return c.noise.D; });
    add_double(r, "sweep.fp_min", [](auto& c) -> auto& { return c.sweep_fp_min; });
    add_double(r, "sweep.fp_max", [](auto& c) -> auto& { return c.sweep_fp_max; });
    add_int(r, "sweep.points", [](auto& c) -> auto& { return c.sweep_points; });
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return r;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

// Re-validates the nested physical types and the command grids after the
// overlay, so a config cannot smuggle in values the library would reject.
void check_invariants(const RunConfig& c, const std::string& command) {
  if (command == "validate") return;
  try {
    c.resonator.validate();
    c.drive.validate();
    c.noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (command == "threshold") {
    require(c.scan_points >= 1, "scan.points must be >= 1");
    require(c.scan_omega_min <= c.scan_omega_max, "scan.omega_min must be <= scan.omega_max");
    require(c.scan_points == 1 || c.scan_omega_min < c.scan_omega_max,
            "scan.omega_min must be < scan.omega_max for a multi-point grid");
    require(c.scan_bracket_lo < c.scan_bracket_hi, "scan bracket must satisfy lo < hi");
    require(c.scan_steps >= 256, "scan.steps must be >= 256");
  } else if (command == "multipliers" || command == "squeeze") {
    require(c.sweep_points >= 1, "sweep.points must be >= 1");
    require(c.sweep_fp_min <= c.sweep_fp_max, "sweep.fp_min must be <= sweep.fp_max");
    require(c.sweep_points == 1 || c.sweep_fp_min < c.sweep_fp_max,
            "sweep.fp_min must be < sweep.fp_max for a multi-point grid");
    if (command == "multipliers") require(c.sweep_steps >= 256, "sweep.steps must be >= 256");
  } else if (command == "transient") {
    require(c.time_t_end > 0.0, "time.t_end must be > 0");
    require(c.time_dt >= 0.0, "time.dt must be >= 0 (0 selects the default)");
    require(c.time_stride >= 1, "time.stride must be >= 1");
    require(c.spectrum_skip_fraction >= 0.0 && c.spectrum_skip_fraction < 1.0,
            "spectrum.skip_fraction must lie in [0, 1)");
  } else if (command == "gain") {
    require(c.curve_points >= 4, "curve.points must be >= 4");
    require(c.measure_dt >= 0.0, "measure.dt must be >= 0 (0 selects the default)");
    require(c.measure_span >= 0.0, "measure.span must be >= 0 (0 selects the default)");
    if (c.measure_enabled)
      require(c.drive.Fs > 0.0, "measure.enabled needs drive.fs > 0");
  } else if (command == "nsd") {
    require(c.band_points >= 2, "band.points must be >= 2");
    require(c.band_nu_min < c.band_nu_max, "band.nu_min must be < band.nu_max");
  }
}

std::map<std::string, std::string> echo(const Registry& reg, const RunConfig& c) {
  std::map<std::string, std::string> out;
  for (const auto& [key, spec] : reg) out.emplace(key, spec.get(c));
  return out;
}

}  // namespace

LoadedConfig load_config(const std::string& path, const std::string& command) {
  if (command == "validate")
    throw ConfigError("the validate command takes no config file");
  Registry reg = registry_for(command);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");

  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    auto it = reg.find(key);
    if (it == reg.end())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                        "' for command '" + command + "'");
    it->second.set(cfg, value);
  }
  check_invariants(cfg, command);
  return {cfg, echo(reg, cfg)};
}

LoadedConfig default_config(const std::string& command) {
  Registry reg = registry_for(command);
  RunConfig cfg;
  check_invariants(cfg, command);
  return {cfg, echo(reg, cfg)};
}

}  // namespace parasqueeze::cli
