#pragma once

#include <cmath>
#include <string>

#include "abbsim/anchors.hpp"
#include "abbsim/device.hpp"
#include "abbsim/types.hpp"

namespace abbsim {

// Knobs the fit does not determine from the anchors. Defaults are the values
// used for every shipped report; override only for sensitivity studies.
struct CalibrationOptions {
  double rail_v = 1.5;          // maximum reverse bias per well
  double alpha = 1.3;           // velocity-saturation exponent
  double n_slope = 1.05;        // subthreshold ideality
  double sigma_vth = 0.02;      // corner-to-corner half spread
  double n_crit = 40.0;         // critical path depth
  double cell_share = 0.25;     // SRAM cell array share of retention leakage
  double periph_ratio = 1.5;    // periphery leakage scale per unit of cell scale
  double pd_residual = 0.01;    // residual fraction of a power-gated block
  double speed_margin_v = 0.0065; // extra overdrive reserved at sign-off
  double lock_tol_rel = 0.01;   // regulator relative lock tolerance, used as
                                // a supply guard band during the speed fit
  double pdp_low = 3.8;         // target window for min PDP at sign-off vdd,
  double pdp_high = 3.9;        // uW/MHz; the fit aims at the midpoint
  int bisect_iters = 80;
};

// Fit summary kept alongside the device so reports can show how the model
// was pinned down.
struct Calibration {
  DeviceParams device;
  AnchorSet anchors;
  double rail_v = 1.5;
  double vth_retention = 0.0;   // effective threshold at full rail bias, typ
  double od_fmin = 0.0;         // overdrive of the fmin lock point at vdd_nom
  double leak_scale_total_w = 0.0;   // sum of all leakage scales
  double active_leak_w = 0.0;   // leakage at the fmin lock point, 25 C typ
  double min_pdp_signoff = 0.0; // continuous-frequency min PDP at signoff vdd
};

namespace detail {

inline double subthreshold_exp(double vth, double n_slope, double temp_c) {
  return std::exp(-vth / (n_slope * thermal_voltage(temp_c)));
}

// Continuous-frequency minimum of total power / frequency at the sign-off
// supply, typical corner, 25 C. For targets at or below the rail-clamped
// ceiling the regulator sits at full rail, so leakage is flat and PDP falls
// as 1/f; above the ceiling the lock point needs more overdrive and leakage
// climbs faster than f. The minimum is therefore exactly at the ceiling.
struct PdpProbe {
  double cdyn = 0.0;
  double leak_rail_w = 0.0;
  double f_rail_hz = 0.0;
  double min_pdp_uw_per_mhz = 0.0;
};

} // namespace detail

// Produces a device model that reproduces the silicon anchors:
//  1. temperature fit: the 25 C / 125 C retention ratio pins the effective
//     retention threshold through the subthreshold exponential,
//  2. speed fit: one scalar (the overdrive of the fmin lock point at
//     vdd_nom) is bisected so the minimum PDP at the sign-off supply lands
//     mid-window; vth0 then follows from the sign-off speed requirement and
//     the body factor from the retention threshold identity,
//  3. magnitude fit: the leakage scale reproduces retention power exactly
//     and the switched capacitance absorbs the rest of the active anchor.
inline Calibration calibrate_models(const AnchorSet& anchors_in,
                                    const CalibrationOptions& opt = {}) {
  AnchorSet anchors = anchors_in;
  anchors.validate();

  const double vt_lo = thermal_voltage(25.0);
  const double vt_hi = thermal_voltage(125.0);
  const double ratio = anchors.retention_uw_125c / anchors.retention_uw_25c;
  if (ratio <= 1.0)
    throw CalibrationInfeasible("retention_uW_125C",
                                "retention power must grow with temperature");

  // Temperature fit. Two-point exponential through the retention anchors.
  const double vth_ret = opt.n_slope * std::log(ratio) / (1.0 / vt_lo - 1.0 / vt_hi);

  const double f_target = anchors.fmin_mhz * 1e6;
  const double vdd_nom = anchors.vdd_nom;
  const double vdd_so = anchors.signoff_vdd_min;
  if (vth_ret >= vdd_so)
    throw CalibrationInfeasible("signoff_vdd_min",
                                "retention threshold exceeds sign-off supply");

  // Scale sum that reproduces retention power at 25 C exactly. Independent
  // of the speed fit because full rail bias always lands on vth_ret.
  const double s_total =
      anchors.retention_uw_25c * 1e-6 / detail::subthreshold_exp(vth_ret, opt.n_slope, 25.0);

  // i0 split: in retention only the cell arrays and the wake-up logic
  // domain leak (periphery fully gated), so their scales sum to s_total.
  // Active operation adds the SRAM periphery on top.
  const double theta = opt.cell_share;
  if (theta <= 0.0 || theta >= 1.0)
    throw CalibrationInfeasible("retention_uW_25C",
                                "cell share must lie strictly inside (0, 1)");
  const double i0_cell = theta * s_total;
  const double i0_periph = opt.periph_ratio * theta * s_total;
  const double i0_logic = (1.0 - theta) * s_total;
  const double i0_active_total = i0_logic + i0_cell + i0_periph;

  // Everything downstream of the speed scalar, evaluated per bisection probe.
  const double v_guard = vdd_so * (1.0 - opt.lock_tol_rel);
  auto probe = [&](double od_fmin) -> detail::PdpProbe {
    detail::PdpProbe out;
    const double k_delay =
        std::pow(od_fmin, opt.alpha) / (opt.n_crit * f_target * vdd_nom);
    const double vth_act = vdd_nom - od_fmin;
    const double lambda_w = i0_active_total *
                            detail::subthreshold_exp(vth_act, opt.n_slope, 25.0);
    const double dyn_w = anchors.total_pdp_uw_per_mhz_at_vdd_nom * 1e-6 *
                             anchors.fmin_mhz - lambda_w;
    out.cdyn = dyn_w / (vdd_nom * vdd_nom * f_target);
    out.leak_rail_w = i0_active_total *
                      detail::subthreshold_exp(vth_ret, opt.n_slope, 25.0) *
                      (vdd_so / vdd_nom);
    const double od_rail = vdd_so - vth_ret;
    out.f_rail_hz = std::pow(od_rail, opt.alpha) / (opt.n_crit * k_delay * vdd_so);
    // J/cycle == W/Hz; scale by 1e12 to quote it in uW/MHz.
    out.min_pdp_uw_per_mhz =
        (out.cdyn * vdd_so * vdd_so + out.leak_rail_w / out.f_rail_hz) * 1e12;
    return out;
  };

  // Speed fit. min PDP at sign-off falls monotonically as the lock point
  // overdrive grows (leakage eats the dynamic budget), so bisect on it.
  // Upper bracket: overdrive at which leakage alone equals the active
  // anchor, i.e. the switched capacitance would go to zero.
  const double pdp_goal = 0.5 * (opt.pdp_low + opt.pdp_high);
  const double active_budget_w =
      anchors.total_pdp_uw_per_mhz_at_vdd_nom * 1e-6 * anchors.fmin_mhz;
  const double vth_zero_cdyn =
      -opt.n_slope * vt_lo * std::log(active_budget_w / i0_active_total);
  double lo = 0.01 * (vdd_so - vth_ret); // nearly all-dynamic: PDP at its cap
  double hi = vdd_nom - vth_zero_cdyn - 1e-6;
  if (hi <= lo || probe(lo).min_pdp_uw_per_mhz < pdp_goal ||
      probe(hi).min_pdp_uw_per_mhz > pdp_goal)
    throw CalibrationInfeasible("total_pdp_uW_per_MHz",
                                "PDP window unreachable for these anchors");
  for (int i = 0; i < opt.bisect_iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid).min_pdp_uw_per_mhz > pdp_goal) lo = mid; else hi = mid;
  }
  const double od_fmin = 0.5 * (lo + hi);
  const detail::PdpProbe fit = probe(od_fmin);
  if (fit.cdyn <= 0.0)
    throw CalibrationInfeasible("total_pdp_uW_per_MHz",
                                "leakage alone exceeds the active power anchor");

  // Sign-off speed requirement pins vth0: at the guard-banded supply the
  // slow corner must still close fmin at zero bias, plus a fixed margin.
  const double od_signoff =
      od_fmin * std::pow(v_guard / vdd_nom, 1.0 / opt.alpha);
  const double vth0 = v_guard - opt.sigma_vth - od_signoff - opt.speed_margin_v;
  if (vth0 <= 0.0)
    throw CalibrationInfeasible("signoff_vdd_min",
                                "sign-off speed requires a negative threshold");
  if (vth_ret <= vth0)
    throw CalibrationInfeasible("retention_uW_125C",
                                "retention threshold below zero-bias threshold");
  const double gamma_body = (vth_ret - vth0) / opt.rail_v;

  Calibration cal;
  cal.anchors = anchors;
  cal.rail_v = opt.rail_v;
  cal.vth_retention = vth_ret;
  cal.od_fmin = od_fmin;
  cal.leak_scale_total_w = s_total;
  cal.min_pdp_signoff = fit.min_pdp_uw_per_mhz;

  DeviceParams& d = cal.device;
  d.vth0 = vth0;
  d.sigma_vth = opt.sigma_vth;
  d.gamma_body = gamma_body;
  d.n_slope = opt.n_slope;
  d.alpha = opt.alpha;
  d.n_crit = opt.n_crit;
  d.k_delay = std::pow(od_fmin, opt.alpha) / (opt.n_crit * f_target * vdd_nom);
  d.vdd_ref = vdd_nom;
  d.pd_residual = opt.pd_residual;
  d.i0_logic = i0_logic;
  d.i0_sram_cell = i0_cell;
  d.i0_sram_periph = i0_periph;
  d.cdyn_logic = fit.cdyn;

  const double vth_act = vdd_nom - od_fmin;
  cal.active_leak_w =
      i0_active_total * detail::subthreshold_exp(vth_act, opt.n_slope, 25.0);

  // Replay every anchor through the final model and insist on 2 % agreement.
  {
    const BiasPair rail{opt.rail_v, opt.rail_v};
    const OperatingPoint ret25{vdd_nom, 25.0, ProcessCorner::typical()};
    const OperatingPoint ret125{vdd_nom, 125.0, ProcessCorner::typical()};
    const double p25 = (leakage_power(d, d.i0_logic, ret25, rail) +
                        leakage_power(d, d.i0_sram_cell, ret25, rail)) * 1e6;
    const double p125 = (leakage_power(d, d.i0_logic, ret125, rail) +
                         leakage_power(d, d.i0_sram_cell, ret125, rail)) * 1e6;
    auto check = [](double got, double want, const char* name) {
      if (!(std::abs(got - want) <= 0.02 * std::abs(want)))
        throw CalibrationInfeasible(name, "model misses anchor by more than 2%");
    };
    check(p25, anchors.retention_uw_25c, "retention_uW_25C");
    check(p125, anchors.retention_uw_125c, "retention_uW_125C");

    const double pdp_nom =
        (fit.cdyn * vdd_nom * vdd_nom + cal.active_leak_w / f_target) * 1e12;
    check(pdp_nom, anchors.total_pdp_uw_per_mhz_at_vdd_nom, "total_pdp_uW_per_MHz");

    const OperatingPoint so{vdd_so, 25.0, ProcessCorner::slow_slow()};
    const double f_so = max_frequency(d, so, BiasPair{});
    if (f_so < f_target)
      throw CalibrationInfeasible("fmin_MHz",
                                  "slow corner misses fmin at sign-off supply");
    if (!(cal.min_pdp_signoff >= opt.pdp_low && cal.min_pdp_signoff <= opt.pdp_high))
      throw CalibrationInfeasible("signoff_vdd_min",
                                  "min PDP did not land in the target window");
  }
  return cal;
}

} // namespace abbsim
