#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "abbsim/sram.hpp"
#include "abbsim/trace.hpp"
#include "abbsim/types.hpp"

namespace abbsim {

// Calibrated energy coefficients for trace-driven dynamic power. Bus toggle
// energy is one coefficient; bus_sram_fraction apportions it between the
// SRAM and logic quadrants of the report, because the gated-vs-ungated
// deltas appear in both quadrants of the measured breakdown.
struct ActivityEnergies {
  double e_macro_access = 0.0;      // J per selected-macro access
  double e_bus_toggle_per_bit = 0.0; // J per toggling bus bit per segment
  double e_logic_per_cycle = 0.0;   // J per clock cycle of core+bus logic
  double leak_gating_overhead = 0.0; // W, isolation/tie cells when gating on
  double bus_sram_fraction = 0.0;   // share of bus energy billed to SRAM

  void validate() const {
    if (e_macro_access < 0 || e_bus_toggle_per_bit < 0 || e_logic_per_cycle < 0 ||
        leak_gating_overhead < 0)
      throw ConfigError("activity energies must be non-negative");
    if (bus_sram_fraction < 0 || bus_sram_fraction > 1)
      throw ConfigError("bus SRAM fraction must lie in [0, 1]");
  }
};

// The eight measured power cells: (logic, SRAM) x (dynamic, leakage) for
// both bus-gating settings, in microwatts, plus the clock they were
// measured at.
struct Table2Targets {
  double logic_dyn_ungated_uw = 308.2;
  double logic_leak_ungated_uw = 2.4;
  double sram_dyn_ungated_uw = 69.9;
  double sram_leak_ungated_uw = 4.2;
  double logic_dyn_gated_uw = 211.8;
  double logic_leak_gated_uw = 2.6;
  double sram_dyn_gated_uw = 51.9;
  double sram_leak_gated_uw = 4.2;
  double f_clk_hz = 50e6;
};

// Address decode: exactly one macro of the addressed bank activates.
inline int select_macro(uint32_t address, int macro_size_kib) {
  if (address >= 32u * 1024u)
    throw std::domain_error("address beyond the 32 KiB bank");
  return static_cast<int>(address / (static_cast<uint32_t>(macro_size_kib) * 1024u));
}

// Average-power evaluation of a trace. With bus gating the toggling data
// bus drives only the selected macro's segment; without it every macro
// segment in the accessed bank toggles. Gating adds a constant isolation
// overhead to logic leakage; SRAM leakage is untouched by gating.
inline PowerBreakdown evaluate_trace_power(const Trace& trace, const ActivityEnergies& e,
                                           const BankConfig& bank, bool gating,
                                           double f_clk,
                                           const PowerBreakdown& leakage_baseline) {
  e.validate();
  if (f_clk <= 0) throw ConfigError("clock frequency must be positive");
  if (bank.macros_per_bank < 1 || bank.macro_size_kib < 1)
    throw ConfigError("bank config must have at least one macro");

  PowerBreakdown out;
  out.logic_leakage = leakage_baseline.logic_leakage +
                      (gating ? e.leak_gating_overhead : 0.0);
  out.sram_leakage = leakage_baseline.sram_leakage;

  if (trace.n_cycles == 0) {
    if (!trace.records.empty())
      throw TraceFormatError("records present but cycle span is zero");
    return out; // dynamic fields exactly zero
  }

  uint64_t last_cycle = 0;
  double macro_energy = 0.0;
  double bus_energy = 0.0;
  const double segments_touched = gating ? 1.0 : static_cast<double>(bank.macros_per_bank);
  for (const AccessRecord& r : trace.records) {
    if (r.cycle < last_cycle)
      throw TraceFormatError("cycle numbers must be non-decreasing");
    last_cycle = r.cycle;
    r.validate();
    (void)select_macro(r.address, bank.macro_size_kib); // decode must succeed
    macro_energy += e.e_macro_access;
    bus_energy += r.data_toggles * segments_touched * e.e_bus_toggle_per_bit;
  }
  const double logic_energy =
      static_cast<double>(trace.n_cycles) * e.e_logic_per_cycle;
  const double per_cycle = f_clk / static_cast<double>(trace.n_cycles);
  out.logic_dynamic = (logic_energy + (1.0 - e.bus_sram_fraction) * bus_energy) * per_cycle;
  out.sram_dynamic = (macro_energy + e.bus_sram_fraction * bus_energy) * per_cycle;
  return out;
}

// Solves the four dynamic-power cells for the four unknowns: logic energy
// per cycle, macro access energy, bus toggle energy, and the SRAM share of
// the bus. The two gating rows differ only in how many bus segments toggle,
// which makes the deltas linear in the toggle energy:
//   logic_dyn_ungated - logic_dyn_gated = (1-share) * T * (m-1) * e_bus * F
//   sram_dyn_ungated  - sram_dyn_gated  =   share   * T * (m-1) * e_bus * F
// with T total toggles, m macros per bank, F = f_clk / cycles.
inline ActivityEnergies calibrate_activity_energies(const Table2Targets& t,
                                                    const TraceStats& stats,
                                                    const BankConfig& bank) {
  bank.validate();
  if (stats.n_cycles == 0 || stats.n_accesses == 0)
    throw SingularSystem("reference trace has no cycles or no accesses");
  if (stats.total_toggles == 0)
    throw SingularSystem("reference trace has no bus toggles");
  if (bank.macros_per_bank < 2)
    throw SingularSystem("single-macro banks make the two gating rows identical");
  if (t.f_clk_hz <= 0) throw ConfigError("target clock must be positive");

  const double per_cycle = t.f_clk_hz / static_cast<double>(stats.n_cycles);
  const double dl = (t.logic_dyn_ungated_uw - t.logic_dyn_gated_uw) * 1e-6;
  const double ds = (t.sram_dyn_ungated_uw - t.sram_dyn_gated_uw) * 1e-6;
  if (dl < 0 || ds < 0)
    throw SingularSystem("gated dynamic power above ungated; bad targets");
  const double delta_total = dl + ds;
  if (delta_total <= 0)
    throw SingularSystem("gating deltas are zero; bus energy unobservable");

  ActivityEnergies e;
  e.bus_sram_fraction = ds / delta_total;
  const double toggles = static_cast<double>(stats.total_toggles);
  const double extra_segments = static_cast<double>(bank.macros_per_bank - 1);
  e.e_bus_toggle_per_bit = delta_total / (toggles * extra_segments * per_cycle);

  const double gated_bus_w = toggles * e.e_bus_toggle_per_bit * per_cycle;
  const double logic_core_w =
      t.logic_dyn_gated_uw * 1e-6 - (1.0 - e.bus_sram_fraction) * gated_bus_w;
  const double sram_core_w =
      t.sram_dyn_gated_uw * 1e-6 - e.bus_sram_fraction * gated_bus_w;
  if (logic_core_w < 0 || sram_core_w < 0)
    throw SingularSystem("bus energy exceeds a dynamic quadrant; bad targets");
  e.e_logic_per_cycle = logic_core_w / (static_cast<double>(stats.n_cycles) * per_cycle);
  e.e_macro_access = sram_core_w / (static_cast<double>(stats.n_accesses) * per_cycle);
  e.leak_gating_overhead = (t.logic_leak_gated_uw - t.logic_leak_ungated_uw) * 1e-6;
  if (e.leak_gating_overhead < 0)
    throw SingularSystem("gating must not reduce logic leakage");
  e.validate();
  return e;
}

// Routing reality check: small macros multiply bus endpoints per bank and
// choke top-level routing at speed. Purely advisory.
inline std::optional<std::string> timing_closure_warning(const BankConfig& bank,
                                                         double f_clk) {
  if (bank.macro_size_kib < 4 && f_clk >= 50e6)
    return "macros below 4 KiB at " + std::to_string(f_clk / 1e6) +
           " MHz risk routing congestion; timing closure not assured";
  return std::nullopt;
}

} // namespace abbsim
