#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace abbsim {

// CODATA 2018 exact values.
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double q_electron  = 1.602176634e-19; // C
inline constexpr double zero_celsius_kelvin = 273.15;

// Qualified operating range shared by the models below.
inline constexpr double vdd_min_v  = 0.3;
inline constexpr double vdd_max_v  = 1.0;
inline constexpr double temp_min_c = -40.0;
inline constexpr double temp_max_c = 125.0;

class ModelError : public std::runtime_error {
public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

class CalibrationInfeasible : public ModelError {
public:
  explicit CalibrationInfeasible(const std::string& anchor, const std::string& detail)
      : ModelError("calibration infeasible: anchor '" + anchor + "': " + detail),
        anchor_name(anchor) {}
  std::string anchor_name;
};

class NoLockError : public ModelError {
public:
  enum class Reason { Unreachable, BudgetExhausted };
  NoLockError(Reason r, const std::string& detail)
      : ModelError("regulator failed to lock: " + detail), reason(r) {}
  Reason reason;
};

class IllegalTransition : public ModelError {
public:
  explicit IllegalTransition(const std::string& detail)
      : ModelError("illegal SRAM state transition: " + detail) {}
};

class CurrentBudgetInfeasible : public ModelError {
public:
  explicit CurrentBudgetInfeasible(const std::string& detail)
      : ModelError("wake-up in-rush budget infeasible: " + detail) {}
};

class SingularSystem : public ModelError {
public:
  explicit SingularSystem(const std::string& detail)
      : ModelError("activity calibration system singular: " + detail) {}
};

class TraceFormatError : public ModelError {
public:
  explicit TraceFormatError(const std::string& detail)
      : ModelError("malformed trace: " + detail) {}
};

class ConfigError : public ModelError {
public:
  explicit ConfigError(const std::string& detail)
      : ModelError("bad config: " + detail) {}
};

class ReportIoError : public ModelError {
public:
  explicit ReportIoError(const std::string& path, const std::string& detail)
      : ModelError("report io failure for '" + path + "': " + detail) {}
};

// Process corner on a continuous slow/fast axis. sigma = +1 is the slow-slow
// extreme (highest threshold), -1 the fast-fast extreme, 0 typical.
struct ProcessCorner {
  double sigma = 0.0;

  static ProcessCorner slow_slow() { return {+1.0}; }
  static ProcessCorner typical()   { return {0.0}; }
  static ProcessCorner fast_fast() { return {-1.0}; }

  void validate() const {
    if (std::isnan(sigma) || sigma < -1.0 || sigma > 1.0)
      throw std::domain_error("process corner sigma outside [-1, 1]");
  }

  std::string label() const {
    if (sigma >= 0.999) return "ss";
    if (sigma <= -0.999) return "ff";
    if (sigma == 0.0) return "tt";
    return (sigma > 0 ? "slow" : "fast") + std::to_string(sigma);
  }
};

struct OperatingPoint {
  double vdd = 0.55;     // volts
  double temp_c = 25.0;  // degrees Celsius
  ProcessCorner corner{};

  void validate() const {
    if (std::isnan(vdd) || std::isnan(temp_c))
      throw std::domain_error("operating point contains NaN");
    if (vdd < vdd_min_v || vdd > vdd_max_v)
      throw std::domain_error("vdd outside qualified range [0.3, 1.0] V");
    if (temp_c < temp_min_c || temp_c > temp_max_c)
      throw std::domain_error("temperature outside qualified range [-40, 125] C");
    corner.validate();
  }
};

// Reverse well bias magnitudes. Both are stored as non-negative volts; the
// rail ceiling is a regulator config parameter, not a type invariant.
struct BiasPair {
  double vnw = 0.0;
  double vpw = 0.0;

  double average() const { return 0.5 * (vnw + vpw); }

  void validate() const {
    if (std::isnan(vnw) || std::isnan(vpw) || vnw < 0.0 || vpw < 0.0)
      throw std::domain_error("bias components must be non-negative");
  }

  bool at_rail(double rail_v, double tol = 1e-12) const {
    return vnw >= rail_v - tol && vpw >= rail_v - tol;
  }
};

// Power split used by the activity evaluator and the reports.
struct PowerBreakdown {
  double logic_dynamic = 0.0; // watts
  double logic_leakage = 0.0;
  double sram_dynamic  = 0.0;
  double sram_leakage  = 0.0;

  double total() const {
    return logic_dynamic + logic_leakage + sram_dynamic + sram_leakage;
  }
};

} // namespace abbsim
