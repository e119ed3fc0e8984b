#pragma once

#include <cmath>
#include <string>

#include "abbsim/device.hpp"
#include "abbsim/types.hpp"

namespace abbsim {

// Closed-loop bias regulator. A delay monitor (modeled as a replica of the
// critical path) is compared against a frequency target; the error moves
// both well biases proportionally. Lock is declared after a run of
// consecutive in-tolerance readings.
struct RegulatorConfig {
  double target_freq = 50e6;   // Hz; 0 means "leakage floor": drive to rail
  double epsilon_rel = 0.01;   // relative lock tolerance
  int lock_count = 4;          // consecutive in-tolerance steps to lock
  double gain = 0.2;           // volts of bias per unit relative error
  int max_steps = 1000;        // iteration budget
  double bias_rail_max = 1.5;  // per-well bias ceiling, volts

  // Replica mismatch: monitor reads fmax*(1+monitor_offset_rel).
  double monitor_offset_rel = 0.0;
  // Off: both wells move together. On: the P-well gets half the step, a
  // fixed 2:1 split for sensitivity studies of unbalanced charge pumps.
  bool asymmetric = false;
  // Wall-clock per regulation step, used when converting lock transients
  // to time and energy. The monitor itself is not time-modeled.
  double step_period_s = 1e-6;

  void validate() const {
    if (target_freq < 0) throw ConfigError("regulator target must be >= 0");
    if (epsilon_rel <= 0 || epsilon_rel >= 1)
      throw ConfigError("epsilon_rel must lie in (0, 1)");
    if (lock_count < 1) throw ConfigError("lock_count must be >= 1");
    if (gain <= 0) throw ConfigError("gain must be positive");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (bias_rail_max <= 0) throw ConfigError("bias rail must be positive");
  }
};

struct RegulatorState {
  BiasPair bias{};
  int steps_taken = 0;
  int in_tolerance_streak = 0;
  bool locked = false;
};

namespace detail {

inline bool bias_at_rail(const BiasPair& b, const RegulatorConfig& cfg) {
  return b.at_rail(cfg.bias_rail_max);
}

// A reading counts as in tolerance when it sits inside the relative band,
// or when the rail is exhausted and the silicon still meets the target.
// The second clause is what lets a deep-retention target lock on fast
// silicon that cannot be slowed below the band, and it makes a zero target
// lock exactly at the rail.
inline bool reading_in_tolerance(double monitor_freq, const BiasPair& bias,
                                 const RegulatorConfig& cfg) {
  if (cfg.target_freq > 0.0 &&
      std::abs(monitor_freq - cfg.target_freq) <= cfg.epsilon_rel * cfg.target_freq)
    return true;
  return bias_at_rail(bias, cfg) && monitor_freq >= cfg.target_freq;
}

} // namespace detail

// One control step. Pure: returns the successor state. Positive error
// (monitor fast) deepens the reverse bias, negative error relaxes it; a
// zero target is treated as maximally fast silicon so the bias walks to
// the rail and locks there.
inline RegulatorState regulator_step(const RegulatorState& state,
                                     const RegulatorConfig& cfg,
                                     double monitor_freq) {
  cfg.validate();
  if (monitor_freq < 0 || std::isnan(monitor_freq))
    throw std::domain_error("monitor frequency must be >= 0");

  const double e = cfg.target_freq > 0.0
                       ? (monitor_freq - cfg.target_freq) / cfg.target_freq
                       : 1.0;
  auto clamp_rail = [&](double v) {
    return std::min(std::max(v, 0.0), cfg.bias_rail_max);
  };

  RegulatorState next = state;
  const double step = cfg.gain * e;
  next.bias.vnw = clamp_rail(state.bias.vnw + step);
  next.bias.vpw = clamp_rail(state.bias.vpw + (cfg.asymmetric ? 0.5 * step : step));
  next.steps_taken = state.steps_taken + 1;

  if (detail::reading_in_tolerance(monitor_freq, state.bias, cfg))
    next.in_tolerance_streak = state.in_tolerance_streak + 1;
  else
    next.in_tolerance_streak = 0;
  next.locked = next.in_tolerance_streak >= cfg.lock_count;
  return next;
}

struct LockResult {
  BiasPair bias{};
  double locked_fmax = 0.0; // true device fmax at the returned bias, Hz
  int steps = 0;
  bool rail_clamped = false; // lock granted by the rail-exhausted clause
};

// Runs the loop against the device model until lock. Throws NoLockError
// with reason Unreachable when the target is above what zero bias can ever
// deliver (reverse bias only slows the part down), and BudgetExhausted when
// the step budget runs out first.
inline LockResult regulate_to_lock(const RegulatorConfig& cfg, const OperatingPoint& op,
                                   const DeviceParams& p,
                                   const RegulatorState& initial = {}) {
  cfg.validate();
  op.validate();

  const double monitor_gain = 1.0 + cfg.monitor_offset_rel;
  const double zb_freq = max_frequency(p, op, BiasPair{}) * monitor_gain;
  if (cfg.target_freq > 0.0 &&
      zb_freq < cfg.target_freq * (1.0 - cfg.epsilon_rel)) {
    throw NoLockError(NoLockError::Reason::Unreachable,
                      "zero-bias monitor at " + std::to_string(zb_freq * 1e-6) +
                          " MHz cannot reach target " +
                          std::to_string(cfg.target_freq * 1e-6) + " MHz");
  }

  RegulatorState st = initial;
  while (st.steps_taken < cfg.max_steps) {
    const double mon = max_frequency(p, op, st.bias) * monitor_gain;
    st = regulator_step(st, cfg, mon);
    if (st.locked) {
      LockResult out;
      out.bias = st.bias;
      out.locked_fmax = max_frequency(p, op, out.bias);
      out.rail_clamped =
          cfg.target_freq == 0.0 ||
          (detail::bias_at_rail(out.bias, cfg) &&
           out.locked_fmax * monitor_gain >
               cfg.target_freq * (1.0 + cfg.epsilon_rel));
      out.steps = st.steps_taken;
      return out;
    }
  }
  throw NoLockError(NoLockError::Reason::BudgetExhausted,
                    "no lock after " + std::to_string(cfg.max_steps) + " steps");
}

// Non-throwing wrapper for grid scans where NoLock is an expected outcome.
struct TryLockResult {
  bool ok = false;
  LockResult lock{};
  NoLockError::Reason fail_reason = NoLockError::Reason::Unreachable;
};

inline TryLockResult try_regulate(const RegulatorConfig& cfg, const OperatingPoint& op,
                                  const DeviceParams& p) {
  TryLockResult r;
  try {
    r.lock = regulate_to_lock(cfg, op, p);
    r.ok = true;
  } catch (const NoLockError& e) {
    r.ok = false;
    r.fail_reason = e.reason;
  }
  return r;
}

// Convenience: the same loop retargeted for the low-frequency wake clock
// used during retention. Starts from the currently locked bias.
inline LockResult retention_retarget(const RegulatorConfig& active_cfg,
                                     const OperatingPoint& op, const DeviceParams& p,
                                     const LockResult& active_lock,
                                     double retention_target_hz = 5e6) {
  RegulatorConfig cfg = active_cfg;
  cfg.target_freq = retention_target_hz;
  RegulatorState st;
  st.bias = active_lock.bias;
  return regulate_to_lock(cfg, op, p, st);
}

} // namespace abbsim
