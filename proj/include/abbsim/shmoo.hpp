#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "abbsim/abb.hpp"
#include "abbsim/device.hpp"
#include "abbsim/rng.hpp"
#include "abbsim/types.hpp"

namespace abbsim {

// Sign-off grid: process corners crossed with supply and temperature
// samples. The defaults are the qualification envelope: corner extremes,
// supply +-10 % around nominal, temperature extremes plus room.
struct SignoffGrid {
  std::vector<ProcessCorner> corners{ProcessCorner::slow_slow(), ProcessCorner::typical(),
                                     ProcessCorner::fast_fast()};
  std::vector<double> vdd_points{0.495, 0.55, 0.605};
  std::vector<double> temps_c{-40.0, 25.0, 125.0};

  void validate() const {
    if (corners.empty() || vdd_points.empty() || temps_c.empty())
      throw ConfigError("sign-off grid axes must be non-empty");
    bool slow = false, fast = false, cold = false, hot = false;
    for (const auto& c : corners) {
      if (c.sigma >= 0.999) slow = true;
      if (c.sigma <= -0.999) fast = true;
    }
    for (double t : temps_c) {
      if (t <= temp_min_c + 1e-9) cold = true;
      if (t >= temp_max_c - 1e-9) hot = true;
    }
    if (!slow || !fast || !cold || !hot)
      throw ConfigError("grid must include the slow/fast and cold/hot extremes");
  }
};

// Guaranteed leakage floor at an operating point: the chip parked at full
// reverse rail with SRAM periphery gated (its retention posture). This is
// the power bound the sign-off flow quotes, and unlike leakage at a locked
// bias it is monotone in corner, temperature and supply, so it has a true
// bounding corner.
inline double leakage_floor(const DeviceParams& p, const OperatingPoint& op,
                            double rail_v) {
  const BiasPair rail{rail_v, rail_v};
  return leakage_power(p, p.i0_logic, op, rail) +
         leakage_power(p, p.i0_sram_cell, op, rail);
}

struct CornerPointResult {
  OperatingPoint op{};
  bool locked = false;
  LockResult lock{};
  double leakage_floor_w = 0.0;
  double locked_leakage_w = 0.0; // all-on leakage at the locked bias
};

struct CornerSweepReport {
  std::vector<CornerPointResult> points;
  double worst_fmax_hz = 0.0;   // min locked fmax over locking points
  OperatingPoint worst_fmax_at{};
  double worst_leakage_w = 0.0; // max leakage floor over the grid
  OperatingPoint worst_leakage_at{};
  int n_nolock = 0;
};

// Accepts any non-empty grid, down to a single point; formal sign-off runs
// call SignoffGrid::validate first to insist on the four extremes.
inline CornerSweepReport corner_sweep(const SignoffGrid& grid, const DeviceParams& p,
                                      const RegulatorConfig& cfg) {
  if (grid.corners.empty() || grid.vdd_points.empty() || grid.temps_c.empty())
    throw ConfigError("sign-off grid axes must be non-empty");
  CornerSweepReport rep;
  rep.worst_fmax_hz = std::numeric_limits<double>::infinity();
  const double i0_all = p.i0_logic + p.i0_sram_cell + p.i0_sram_periph;
  for (const ProcessCorner& corner : grid.corners) {
    for (double temp : grid.temps_c) {
      for (double vdd : grid.vdd_points) {
        CornerPointResult r;
        r.op = OperatingPoint{vdd, temp, corner};
        r.op.validate();
        r.leakage_floor_w = leakage_floor(p, r.op, cfg.bias_rail_max);
        const TryLockResult t = try_regulate(cfg, r.op, p);
        r.locked = t.ok;
        if (t.ok) {
          r.lock = t.lock;
          r.locked_leakage_w = leakage_power(p, i0_all, r.op, t.lock.bias);
          if (t.lock.locked_fmax < rep.worst_fmax_hz) {
            rep.worst_fmax_hz = t.lock.locked_fmax;
            rep.worst_fmax_at = r.op;
          }
        } else {
          ++rep.n_nolock;
        }
        if (r.leakage_floor_w > rep.worst_leakage_w) {
          rep.worst_leakage_w = r.leakage_floor_w;
          rep.worst_leakage_at = r.op;
        }
        rep.points.push_back(r);
      }
    }
  }
  return rep;
}

struct BoundingRanges {
  double sigma_min = -1.0, sigma_max = 1.0;
  double vdd_min = 0.495, vdd_max = 0.605;
  double temp_min = -40.0, temp_max = 125.0;
};

struct BoundingCounterexample {
  OperatingPoint op{};
  std::string metric;  // "speed" or "leakage"
  double value = 0.0;
  double bound = 0.0;
};

struct BoundingCheckResult {
  bool bounded = true;
  double speed_bound_hz = 0.0;   // min intrinsic fmax over the four corners
  double leakage_bound_w = 0.0;  // max leakage floor over the four corners
  std::vector<BoundingCounterexample> counterexamples;
};

// Samples random interior (sigma, vdd, temp) points and checks that the
// four process/temperature bounding corners really bound them: intrinsic
// zero-bias speed from below and the leakage floor from above. Speed uses
// the zero-bias maximum frequency because the locked frequency is pinned
// to the regulator target everywhere and cannot rank silicon.
inline BoundingCheckResult bounding_corner_check(const DeviceParams& p,
                                                 const BoundingRanges& rng_cfg,
                                                 int n_samples, uint64_t seed) {
  if (n_samples < 0) throw ConfigError("sample count must be >= 0");
  BoundingCheckResult res;

  const double sig_lo = rng_cfg.sigma_min, sig_hi = rng_cfg.sigma_max;
  const BiasPair zb{};
  res.speed_bound_hz = std::numeric_limits<double>::infinity();
  for (double sigma : {sig_lo, sig_hi}) {
    for (double temp : {rng_cfg.temp_min, rng_cfg.temp_max}) {
      const OperatingPoint cold_slow{rng_cfg.vdd_min, temp, ProcessCorner{sigma}};
      res.speed_bound_hz = std::min(res.speed_bound_hz, max_frequency(p, cold_slow, zb));
      const OperatingPoint hot_fast{rng_cfg.vdd_max, temp, ProcessCorner{sigma}};
      res.leakage_bound_w =
          std::max(res.leakage_bound_w, leakage_floor(p, hot_fast, 1.5));
    }
  }

  SplitMix64 rng(seed);
  for (int i = 0; i < n_samples; ++i) {
    const double sigma = sig_lo + (sig_hi - sig_lo) * rng.u01();
    const double vdd = rng_cfg.vdd_min + (rng_cfg.vdd_max - rng_cfg.vdd_min) * rng.u01();
    const double temp = rng_cfg.temp_min + (rng_cfg.temp_max - rng_cfg.temp_min) * rng.u01();
    const OperatingPoint op{vdd, temp, ProcessCorner{sigma}};
    const double f = max_frequency(p, op, zb);
    if (f < res.speed_bound_hz) {
      res.bounded = false;
      res.counterexamples.push_back({op, "speed", f, res.speed_bound_hz});
    }
    const double leak = leakage_floor(p, op, 1.5);
    if (leak > res.leakage_bound_w) {
      res.bounded = false;
      res.counterexamples.push_back({op, "leakage", leak, res.leakage_bound_w});
    }
  }
  return res;
}

enum class ShmooCause { None, PllLock, AbbLock, Mbist, Workload };

inline const char* to_string(ShmooCause c) {
  switch (c) {
    case ShmooCause::None: return "";
    case ShmooCause::PllLock: return "PllLock";
    case ShmooCause::AbbLock: return "AbbLock";
    case ShmooCause::Mbist: return "Mbist";
    case ShmooCause::Workload: return "Workload";
  }
  return "?";
}

struct ShmooCell {
  bool pass = false;
  ShmooCause cause = ShmooCause::None;
  double pdp_uw_per_mhz = std::numeric_limits<double>::quiet_NaN(); // PASS only
};

struct ShmooGrid {
  std::vector<double> vdd_axis;  // ascending
  std::vector<double> freq_axis; // ascending, Hz
  std::vector<ShmooCell> cells;  // row-major: vdd index major, freq minor

  const ShmooCell& at(size_t vi, size_t fi) const {
    return cells[vi * freq_axis.size() + fi];
  }
};

struct ShmooConfig {
  double pll_vmin = 0.45;
  double sram_vmin = 0.45;
  RegulatorConfig regulator{};
};

// PASS requires, in order: PLL lock (a supply threshold), bias-loop lock at
// the cell's frequency target, MBIST (a supply threshold), and the workload
// fitting under the locked maximum frequency. An unreachable target is a
// workload failure (the silicon is simply too slow); only a regulation
// budget blowup counts as an AbbLock failure.
inline ShmooGrid shmoo_scan(const std::vector<double>& vdd_axis,
                            const std::vector<double>& freq_axis,
                            double temp_c, const ProcessCorner& corner,
                            const DeviceParams& p, const ShmooConfig& cfg) {
  if (vdd_axis.empty() || freq_axis.empty())
    throw ConfigError("shmoo axes must be non-empty");
  for (size_t i = 1; i < vdd_axis.size(); ++i)
    if (vdd_axis[i] <= vdd_axis[i - 1]) throw ConfigError("vdd axis must ascend");
  for (size_t i = 1; i < freq_axis.size(); ++i)
    if (freq_axis[i] <= freq_axis[i - 1]) throw ConfigError("freq axis must ascend");

  const double edge_tol = 1e-9; // absorb decimal-axis rounding at thresholds
  ShmooGrid grid;
  grid.vdd_axis = vdd_axis;
  grid.freq_axis = freq_axis;
  grid.cells.resize(vdd_axis.size() * freq_axis.size());
  const double i0_all = p.i0_logic + p.i0_sram_cell + p.i0_sram_periph;

  for (size_t vi = 0; vi < vdd_axis.size(); ++vi) {
    const double vdd = vdd_axis[vi];
    for (size_t fi = 0; fi < freq_axis.size(); ++fi) {
      const double f = freq_axis[fi];
      ShmooCell& cell = grid.cells[vi * grid.freq_axis.size() + fi];
      const OperatingPoint op{vdd, temp_c, corner};

      if (vdd < cfg.pll_vmin - edge_tol) {
        cell.cause = ShmooCause::PllLock;
        continue;
      }
      RegulatorConfig rc = cfg.regulator;
      rc.target_freq = f;
      const TryLockResult t = try_regulate(rc, op, p);
      if (!t.ok && t.fail_reason == NoLockError::Reason::BudgetExhausted) {
        cell.cause = ShmooCause::AbbLock;
        continue;
      }
      if (vdd < cfg.sram_vmin - edge_tol) {
        cell.cause = ShmooCause::Mbist;
        continue;
      }
      if (!t.ok || f > t.lock.locked_fmax) {
        cell.cause = ShmooCause::Workload;
        continue;
      }
      cell.pass = true;
      const double power_w = p.cdyn_logic * vdd * vdd * f +
                             leakage_power(p, i0_all, op, t.lock.bias);
      cell.pdp_uw_per_mhz = power_w / f * 1e12;
    }
  }
  return grid;
}

// Structural sanity of a scan: PASS regions are downward-closed in
// frequency and upward-closed in supply.
inline bool shmoo_monotone(const ShmooGrid& g) {
  for (size_t vi = 0; vi < g.vdd_axis.size(); ++vi)
    for (size_t fi = 1; fi < g.freq_axis.size(); ++fi)
      if (g.at(vi, fi).pass && !g.at(vi, fi - 1).pass) return false;
  for (size_t fi = 0; fi < g.freq_axis.size(); ++fi)
    for (size_t vi = 1; vi < g.vdd_axis.size(); ++vi)
      if (g.at(vi - 1, fi).pass && !g.at(vi, fi).pass) return false;
  return true;
}

} // namespace abbsim
