#pragma once

#include <cmath>

#include "abbsim/types.hpp"

namespace abbsim {

// Compact transistor-level model of the cell library. Leakage follows a
// subthreshold exponential in the effective threshold; switching speed
// follows an alpha-power-law drive current. Reverse body bias raises the
// effective threshold through the body coefficient, trading speed for an
// exponential drop in leakage.
struct DeviceParams {
  // Threshold stack.
  double vth0 = 0.30;        // zero-bias typical threshold, V
  double sigma_vth = 0.02;   // one-corner threshold shift, V
  double gamma_body = 0.07;  // body factor, V of vth per V of average RBB

  // Subthreshold slope and leakage scale.
  double n_slope = 1.05;             // ideality factor
  double i0_logic = 1.0;             // logic leakage scale, W
  double i0_sram_cell = 1.0;         // SRAM cell-array leakage scale, W
  double i0_sram_periph = 1.0;       // SRAM periphery leakage scale, W
  double vdd_ref = 0.55;             // vdd at which the scales are quoted
  double pd_residual = 0.01;         // fraction of periphery left on when gated

  // Delay model.
  double alpha = 1.3;     // velocity-saturation exponent
  double k_delay = 1.0;   // per-stage delay scale, s*V^(alpha-1)
  double n_crit = 40.0;   // logic depth of the critical path

  // Dynamic energy.
  double cdyn_logic = 1.0e-11; // effective switched capacitance per cycle, F

  // Optional mid-range leakage anomaly used by corner-audit tests. Zero in
  // any calibrated model; a positive value injects a parabolic bump that
  // peaks between the temperature extremes.
  double leak_temp_anomaly = 0.0;
};

inline double thermal_voltage(double temp_c) {
  return k_boltzmann * (temp_c + zero_celsius_kelvin) / q_electron;
}

inline double effective_threshold(const DeviceParams& p, const ProcessCorner& corner,
                                  const BiasPair& bias) {
  return p.vth0 + p.sigma_vth * corner.sigma + p.gamma_body * bias.average();
}

namespace detail {

inline double anomaly_factor(const DeviceParams& p, double temp_c) {
  if (p.leak_temp_anomaly == 0.0) return 1.0;
  const double half_span = 0.5 * (temp_max_c - temp_min_c);
  const double u = (temp_c - temp_min_c) * (temp_max_c - temp_c) / (half_span * half_span);
  return 1.0 + p.leak_temp_anomaly * u;
}

} // namespace detail

// Leakage for one scale factor i0. The exponential argument uses the thermal
// voltage at the actual junction temperature, so leakage rises steeply with
// temperature even though i0 itself is temperature-flat.
inline double leakage_power(const DeviceParams& p, double i0, const OperatingPoint& op,
                            const BiasPair& bias) {
  op.validate();
  bias.validate();
  const double vth = effective_threshold(p, op.corner, bias);
  const double vt = thermal_voltage(op.temp_c);
  const double base = i0 * std::exp(-vth / (p.n_slope * vt)) * (op.vdd / p.vdd_ref);
  return base * detail::anomaly_factor(p, op.temp_c);
}

// Highest clock the critical path closes at. Zero when the supply does not
// exceed the effective threshold: the path has no drive at all.
inline double max_frequency(const DeviceParams& p, const OperatingPoint& op,
                            const BiasPair& bias) {
  op.validate();
  bias.validate();
  const double vth = effective_threshold(p, op.corner, bias);
  const double overdrive = op.vdd - vth;
  if (overdrive <= 0.0) return 0.0;
  return std::pow(overdrive, p.alpha) / (p.n_crit * p.k_delay * op.vdd);
}

} // namespace abbsim
