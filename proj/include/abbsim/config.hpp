#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "abbsim/abb.hpp"
#include "abbsim/anchors.hpp"
#include "abbsim/calibrate.hpp"
#include "abbsim/modes.hpp"
#include "abbsim/shmoo.hpp"
#include "abbsim/sram.hpp"
#include "abbsim/trace.hpp"
#include "abbsim/types.hpp"

namespace abbsim {

// FNV-1a, 64 bit. Test vectors: "" -> 0xcbf29ce484222325,
// "a" -> 0xaf63dc4c8601ec8c.
inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace detail

// Flat `section.key=value` configuration. Keys are unique; a later merge of
// the same key wins, which is what gives presets < file < flags precedence.
struct ConfigMap {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { kv[key] = value; }

  // Canonical serialization for hashing: sorted key=value lines. The output
  // directory is excluded because relocating the reports cannot change any
  // number in them.
  std::string canonical() const {
    std::string s;
    for (const auto& [key, value] : kv) {
      if (key == "out.dir") continue;
      s += key;
      s += '=';
      s += value;
      s += '\n';
    }
    return s;
  }

  uint64_t hash() const { return fnv1a64(canonical()); }
};

inline void merge_config_text(ConfigMap& m, const std::string& text,
                              const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": empty key or value");
    m.set(key, value);
  }
}

inline void merge_config_file(ConfigMap& m, const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ReportIoError(path, "cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  merge_config_text(m, ss.str(), path);
}

// Anchor files may omit the `anchors.` prefix; normalize before merging.
inline void merge_anchor_file(ConfigMap& m, const std::string& path) {
  ConfigMap raw;
  merge_config_file(raw, path);
  for (const auto& [key, value] : raw.kv) {
    const std::string full =
        key.rfind("anchors.", 0) == 0 ? key : "anchors." + key;
    m.set(full, value);
  }
}

// The `paper` preset: the published silicon anchors written out explicitly
// (so they land in the config hash) plus the MBIST threshold moved up to
// the sign-off border, which is where the measured shmoo stops passing.
inline void apply_paper_preset(ConfigMap& m) {
  m.set("anchors.retention_uW_25C", "3.2");
  m.set("anchors.retention_uW_125C", "142");
  m.set("anchors.total_pdp_uW_per_MHz", "4.8");
  m.set("anchors.fmin_MHz", "50");
  m.set("anchors.signoff_vdd_min", "0.50");
  m.set("anchors.vdd_nom", "0.55");
  m.set("anchors.temp_lo_C", "-40");
  m.set("anchors.temp_hi_C", "125");
  m.set("shmoo.sram_vmin", "0.50");
  m.set("modes.coremark_per_mhz", "3.19");
}

// `lo:hi:step` -> inclusive ascending values. Values are computed as
// integer multiples of the step so decimal axes land exactly on the grid
// (0.41:0.70:0.01 contains 0.50 as the double 0.5, not 0.499999...).
inline std::vector<double> parse_axis(const std::string& spec, double unit_scale = 1.0) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream ss(spec);
  if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':')
    throw ConfigError("axis '" + spec + "' must be lo:hi:step");
  std::string rest;
  if (ss >> rest) throw ConfigError("axis '" + spec + "' has trailing text");
  if (step <= 0) throw ConfigError("axis step must be positive");
  if (hi < lo) throw ConfigError("axis must ascend");
  const long long k0 = std::llround(lo / step);
  const long long n = std::llround((hi - lo) / step);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n + 1));
  for (long long k = 0; k <= n; ++k)
    out.push_back(static_cast<double>(k0 + k) * step * unit_scale);
  return out;
}

// Everything one run needs, assembled from a ConfigMap with every key
// checked against the schema below. Fields the map does not mention keep
// the library defaults.
struct RunConfig {
  ConfigMap raw;
  AnchorSet anchors{};
  CalibrationOptions cal{};
  RegulatorConfig regulator{};
  SramMacroConfig sram{};
  BankConfig bank{};
  TraceGenConfig trace{};
  uint64_t trace_cycles = 1000000;
  std::string trace_file = "trace.txt";
  ModeConfig modes{};
  std::string schedule = "active 10ms | retention 990ms";
  double coremark_per_mhz = 3.19;
  ShmooConfig shmoo{};
  double shmoo_temp_c = 25.0;
  ProcessCorner shmoo_corner = ProcessCorner::typical();
  std::string shmoo_vdd_axis = "0.41:0.70:0.01";
  std::string shmoo_freq_axis_mhz = "5:100:5";
  bool shmoo_svg = false;
  SignoffGrid signoff_grid{};
  int signoff_samples = 10000;
  double device_leak_temp_anomaly = 0.0;
  std::string out_dir = "out";
  uint64_t seed = 0;
};

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' has non-numeric value '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' has non-integer value '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw ConfigError("key '" + key + "' has non-boolean value '" + v + "'");
}

inline ProcessCorner to_corner(const std::string& key, const std::string& v) {
  if (v == "ss") return ProcessCorner::slow_slow();
  if (v == "tt") return ProcessCorner::typical();
  if (v == "ff") return ProcessCorner::fast_fast();
  throw ConfigError("key '" + key + "' must be one of ss, tt, ff");
}

} // namespace detail

inline RunConfig build_run_config(const ConfigMap& m) {
  using detail::to_bool;
  using detail::to_corner;
  using detail::to_double;
  using detail::to_int;

  RunConfig rc;
  rc.raw = m;
  std::map<std::string, std::string> anchor_kv;
  bool regulator_target_set = false;

  for (const auto& [key, v] : m.kv) {
    if (key.rfind("anchors.", 0) == 0) {
      anchor_kv[key.substr(8)] = v;
    } else if (key == "calibration.rail_v") {
      rc.cal.rail_v = to_double(key, v);
    } else if (key == "calibration.alpha") {
      rc.cal.alpha = to_double(key, v);
    } else if (key == "calibration.n_slope") {
      rc.cal.n_slope = to_double(key, v);
    } else if (key == "calibration.sigma_vth") {
      rc.cal.sigma_vth = to_double(key, v);
    } else if (key == "calibration.n_crit") {
      rc.cal.n_crit = to_double(key, v);
    } else if (key == "calibration.cell_share") {
      rc.cal.cell_share = to_double(key, v);
    } else if (key == "calibration.periph_ratio") {
      rc.cal.periph_ratio = to_double(key, v);
    } else if (key == "calibration.pd_residual") {
      rc.cal.pd_residual = to_double(key, v);
    } else if (key == "calibration.speed_margin_v") {
      rc.cal.speed_margin_v = to_double(key, v);
    } else if (key == "calibration.lock_tol_rel") {
      rc.cal.lock_tol_rel = to_double(key, v);
    } else if (key == "calibration.pdp_low") {
      rc.cal.pdp_low = to_double(key, v);
    } else if (key == "calibration.pdp_high") {
      rc.cal.pdp_high = to_double(key, v);
    } else if (key == "device.leak_temp_anomaly") {
      rc.device_leak_temp_anomaly = to_double(key, v);
    } else if (key == "regulator.target_mhz") {
      rc.regulator.target_freq = to_double(key, v) * 1e6;
      regulator_target_set = true;
    } else if (key == "regulator.epsilon_rel") {
      rc.regulator.epsilon_rel = to_double(key, v);
    } else if (key == "regulator.lock_count") {
      rc.regulator.lock_count = static_cast<int>(to_int(key, v));
    } else if (key == "regulator.gain") {
      rc.regulator.gain = to_double(key, v);
    } else if (key == "regulator.max_steps") {
      rc.regulator.max_steps = static_cast<int>(to_int(key, v));
    } else if (key == "regulator.monitor_offset_rel") {
      rc.regulator.monitor_offset_rel = to_double(key, v);
    } else if (key == "regulator.asymmetric") {
      rc.regulator.asymmetric = to_bool(key, v);
    } else if (key == "regulator.step_period_us") {
      rc.regulator.step_period_s = to_double(key, v) * 1e-6;
    } else if (key == "sram.size_kib") {
      rc.sram.size_kib = static_cast<int>(to_int(key, v));
    } else if (key == "sram.n_power_segments") {
      rc.sram.n_power_segments = static_cast<int>(to_int(key, v));
    } else if (key == "sram.segment_capacitance_pf") {
      rc.sram.segment_capacitance = to_double(key, v) * 1e-12;
    } else if (key == "sram.current_limit_ma") {
      rc.sram.current_limit = to_double(key, v) * 1e-3;
    } else if (key == "sram.wake_ns") {
      rc.sram.wake_ns_default = to_double(key, v);
    } else if (key == "bank.macro_size_kib") {
      rc.bank = BankConfig::with_macro(static_cast<int>(to_int(key, v)));
    } else if (key == "trace.access_rate") {
      rc.trace.access_rate = to_double(key, v);
    } else if (key == "trace.write_fraction") {
      rc.trace.write_fraction = to_double(key, v);
    } else if (key == "trace.mean_toggles") {
      rc.trace.mean_toggles = to_double(key, v);
    } else if (key == "trace.hot_fraction") {
      rc.trace.hot_fraction = to_double(key, v);
    } else if (key == "trace.hot_window_bytes") {
      rc.trace.hot_window_bytes = static_cast<uint32_t>(to_int(key, v));
    } else if (key == "trace.cycles") {
      rc.trace_cycles = static_cast<uint64_t>(to_int(key, v));
    } else if (key == "trace.file") {
      rc.trace_file = v;
    } else if (key == "modes.schedule") {
      rc.schedule = v;
    } else if (key == "modes.retention_target_mhz") {
      rc.modes.retention_target_hz = to_double(key, v) * 1e6;
    } else if (key == "modes.wake_latency_ns") {
      rc.modes.wake_latency_s = to_double(key, v) * 1e-9;
    } else if (key == "modes.relock_energy_j") {
      rc.modes.relock_energy_j = to_double(key, v);
    } else if (key == "modes.coremark_per_mhz") {
      rc.coremark_per_mhz = to_double(key, v);
    } else if (key == "shmoo.pll_vmin") {
      rc.shmoo.pll_vmin = to_double(key, v);
    } else if (key == "shmoo.sram_vmin") {
      rc.shmoo.sram_vmin = to_double(key, v);
    } else if (key == "shmoo.temp_C") {
      rc.shmoo_temp_c = to_double(key, v);
    } else if (key == "shmoo.corner") {
      rc.shmoo_corner = to_corner(key, v);
    } else if (key == "shmoo.vdd_axis") {
      rc.shmoo_vdd_axis = v;
    } else if (key == "shmoo.freq_axis_mhz") {
      rc.shmoo_freq_axis_mhz = v;
    } else if (key == "shmoo.svg") {
      rc.shmoo_svg = to_bool(key, v);
    } else if (key == "signoff.samples") {
      rc.signoff_samples = static_cast<int>(to_int(key, v));
    } else if (key == "out.dir") {
      rc.out_dir = v;
    } else if (key == "run.seed") {
      rc.seed = static_cast<uint64_t>(to_int(key, v));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  rc.anchors = anchors_from_map(anchor_kv);
  if (!regulator_target_set)
    rc.regulator.target_freq = rc.anchors.fmin_mhz * 1e6;
  // One rail: the regulator ceiling is the calibration's bias rail.
  rc.regulator.bias_rail_max = rc.cal.rail_v;
  rc.regulator.validate();
  rc.trace.validate();
  rc.sram.validate();
  rc.bank.validate();
  rc.modes.regulator = rc.regulator;
  rc.shmoo.regulator = rc.regulator;
  // Validated by corner_sweep itself, so anchor overrides that narrow the
  // envelope only fail the commands that actually sweep it.
  rc.signoff_grid.vdd_points = {rc.anchors.vdd_nom * 0.9, rc.anchors.vdd_nom,
                                rc.anchors.vdd_nom * 1.1};
  rc.signoff_grid.temps_c = {rc.anchors.temp_lo_c, 25.0, rc.anchors.temp_hi_c};
  return rc;
}

} // namespace abbsim
