#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "abbsim/device.hpp"
#include "abbsim/types.hpp"

namespace abbsim {

// Fixed retention-controller block area, solved so a 4 KiB macro at the
// 468 KiB/mm2 array density carries exactly 2.1 % overhead.
inline constexpr double default_controller_area_mm2 =
    (0.021 / 0.979) * (4.0 / 468.0);

// One retention-capable SRAM macro. The chip composes 4 banks of 32 KiB
// from macros of a single size.
struct SramMacroConfig {
  int size_kib = 4;              // one of {1, 2, 4, 8}
  int n_power_segments = 8;      // staged power switches for wake-up
  double segment_capacitance = 20e-12; // F charged per segment at wake
  double current_limit = 10e-3;  // A, peak in-rush budget
  double controller_area_mm2 = default_controller_area_mm2;
  double array_area_per_kib_mm2 = 1.0 / 468.0; // bitcell density
  // Total wake duration at the default 8-segment configuration. Stage
  // spacing is wake_ns_default/8 = 25 ns and stays fixed when the segment
  // count is reconfigured, so duration scales linearly with segments.
  double wake_ns_default = 200.0;

  // The invariant list wants >= 2 segments, but the in-rush examples probe
  // the degenerate single-segment case, so validation stops at >= 1.
  void validate() const {
    if (size_kib != 1 && size_kib != 2 && size_kib != 4 && size_kib != 8)
      throw ConfigError("macro size must be one of {1,2,4,8} KiB");
    if (n_power_segments < 1)
      throw ConfigError("need at least one power segment");
    if (segment_capacitance <= 0 || current_limit <= 0)
      throw ConfigError("segment capacitance and current limit must be positive");
    if (controller_area_mm2 <= 0 || array_area_per_kib_mm2 <= 0)
      throw ConfigError("area parameters must be positive");
    if (wake_ns_default <= 0) throw ConfigError("wake duration must be positive");
  }

  double stage_interval_s() const { return wake_ns_default * 1e-9 / 8.0; }
};

enum class SramPhase { Active, Retention, PowerDown, WakingUp };

inline const char* to_string(SramPhase s) {
  switch (s) {
    case SramPhase::Active: return "active";
    case SramPhase::Retention: return "retention";
    case SramPhase::PowerDown: return "power-down";
    case SramPhase::WakingUp: return "waking-up";
  }
  return "?";
}

struct SramPowerState {
  SramPhase phase = SramPhase::Active;
  int wake_stage = 0;          // meaningful only while WakingUp
  bool contents_valid = true;

  static SramPowerState active() { return {SramPhase::Active, 0, true}; }
};

struct BankConfig {
  int bank_kib = 32;
  int macro_size_kib = 4;
  int macros_per_bank = 8;
  int n_banks = 4;

  void validate() const {
    if (macro_size_kib != 1 && macro_size_kib != 2 && macro_size_kib != 4 &&
        macro_size_kib != 8)
      throw ConfigError("macro size must be one of {1,2,4,8} KiB");
    if (macros_per_bank * macro_size_kib != bank_kib)
      throw ConfigError("macros_per_bank * macro_size_kib must equal bank size");
    if (bank_kib * n_banks != 128)
      throw ConfigError("banks must total 128 KiB");
  }

  static BankConfig with_macro(int size_kib) {
    BankConfig b;
    b.macro_size_kib = size_kib;
    b.macros_per_bank = b.bank_kib / size_kib;
    b.validate();
    return b;
  }
};

// Settled-state transition request. Waking is not a valid request target;
// it is entered implicitly on any *->Active wake path and advanced by
// advance_wake. Requests on a macro that is mid-wake are rejected.
inline SramPowerState request_transition(const SramPowerState& s, SramPhase target) {
  if (target == SramPhase::WakingUp)
    throw IllegalTransition("WakingUp is not a requestable target");
  if (s.phase == SramPhase::WakingUp)
    throw IllegalTransition("macro is mid-wake; finish the wake sequence first");
  if (s.phase == target) return s; // self-transition is a no-op

  SramPowerState next = s;
  switch (s.phase) {
    case SramPhase::Active:
      next.phase = target;
      if (target == SramPhase::PowerDown) next.contents_valid = false;
      return next;
    case SramPhase::Retention:
      if (target == SramPhase::Active) {
        next.phase = SramPhase::WakingUp;
        next.wake_stage = 0;
        return next; // contents ride through the wake untouched
      }
      next.phase = SramPhase::PowerDown;
      next.contents_valid = false;
      return next;
    case SramPhase::PowerDown:
      if (target == SramPhase::Retention)
        throw IllegalTransition("power-down erased the array; nothing to retain");
      next.phase = SramPhase::WakingUp;
      next.wake_stage = 0;
      next.contents_valid = false;
      return next;
    case SramPhase::WakingUp:
      break;
  }
  throw IllegalTransition("unhandled source state");
}

// Advances one wake stage; settles into Active after the last segment.
inline SramPowerState advance_wake(const SramPowerState& s, const SramMacroConfig& cfg) {
  cfg.validate();
  if (s.phase != SramPhase::WakingUp)
    throw IllegalTransition("advance_wake outside a wake sequence");
  SramPowerState next = s;
  if (s.wake_stage + 1 >= cfg.n_power_segments) {
    next.phase = SramPhase::Active;
    next.wake_stage = 0;
  } else {
    next.wake_stage = s.wake_stage + 1;
  }
  return next;
}

// A completed write re-validates the contents after a power-down wake.
inline SramPowerState mark_written(const SramPowerState& s) {
  if (s.phase != SramPhase::Active)
    throw IllegalTransition("writes require the Active state");
  SramPowerState next = s;
  next.contents_valid = true;
  return next;
}

struct WakeProfile {
  std::vector<double> stage_tau_s;     // switch time constant per stage
  std::vector<double> stage_peak_a;    // peak in-rush per stage
  double stage_interval_s = 0.0;
  double total_duration_s = 0.0;
};

// Staged re-power: segments switch one per interval. The switch time
// constant defaults to a fifth of the interval and is stretched when the
// peak C*V/tau would break the current budget; once the needed stretch
// exceeds the interval itself the schedule is infeasible.
inline WakeProfile wake_sequence_profile(const SramMacroConfig& cfg, double vdd) {
  cfg.validate();
  if (vdd <= 0 || std::isnan(vdd)) throw std::domain_error("vdd must be positive");

  const double interval = cfg.stage_interval_s();
  const double tau_floor = interval / 5.0;
  const double tau_budget = cfg.segment_capacitance * vdd / cfg.current_limit;
  const double tau = std::max(tau_floor, tau_budget);
  if (tau > interval)
    throw CurrentBudgetInfeasible(
        "segment needs tau " + std::to_string(tau * 1e9) + " ns > stage interval " +
        std::to_string(interval * 1e9) + " ns at current limit " +
        std::to_string(cfg.current_limit * 1e3) + " mA");

  WakeProfile w;
  w.stage_interval_s = interval;
  w.total_duration_s = interval * cfg.n_power_segments;
  w.stage_tau_s.assign(cfg.n_power_segments, tau);
  const double peak = cfg.segment_capacitance * vdd / tau;
  w.stage_peak_a.assign(cfg.n_power_segments, peak);
  return w;
}

// Leakage of one macro in a given state. Scales are the chip-wide SRAM
// scales prorated by macro size (128 KiB total across all banks).
inline double macro_power(const SramMacroConfig& cfg, const SramPowerState& s,
                          const OperatingPoint& op, const BiasPair& bias,
                          const DeviceParams& p) {
  cfg.validate();
  const double share = cfg.size_kib / 128.0;
  const double cell = leakage_power(p, p.i0_sram_cell * share, op, bias);
  const double periph = leakage_power(p, p.i0_sram_periph * share, op, bias);
  switch (s.phase) {
    case SramPhase::Active:
    case SramPhase::WakingUp: // conservatively billed at the active rate
      return cell + periph;
    case SramPhase::Retention:
      return cell; // periphery power-gated entirely
    case SramPhase::PowerDown:
      return p.pd_residual * (cell + periph);
  }
  return 0.0;
}

// Fixed controller block amortized over the array area.
inline double retention_area_overhead_pct(const SramMacroConfig& cfg) {
  cfg.validate();
  const double array = cfg.array_area_per_kib_mm2 * cfg.size_kib;
  return cfg.controller_area_mm2 / (cfg.controller_area_mm2 + array) * 100.0;
}

} // namespace abbsim
