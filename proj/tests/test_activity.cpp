#include <catch2/catch_amalgamated.hpp>

#include "abbsim/activity.hpp"

using namespace abbsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Trace reference_trace() { return generate_trace(TraceGenConfig{}, 100'000, 3); }

PowerBreakdown leakage_baseline() {
  PowerBreakdown b;
  b.logic_leakage = 2.4e-6;
  b.sram_leakage = 4.2e-6;
  return b;
}

} // namespace

TEST_CASE("macro address decode") {
  CHECK(select_macro(0, 4) == 0);
  CHECK(select_macro(4095, 4) == 0);
  CHECK(select_macro(4096, 4) == 1);
  CHECK(select_macro(32767, 4) == 7);
  CHECK(select_macro(32767, 8) == 3);
  CHECK(select_macro(1023, 1) == 0);
  CHECK_THROWS_AS(select_macro(32768, 4), std::domain_error);
}

TEST_CASE("calibrated energies reproduce all eight measured cells") {
  const Trace t = reference_trace();
  const TraceStats stats = trace_stats(t);
  const BankConfig bank = BankConfig::with_macro(4); // 8 macros per bank
  const Table2Targets targets;
  const ActivityEnergies e = calibrate_activity_energies(targets, stats, bank);

  const PowerBreakdown u =
      evaluate_trace_power(t, e, bank, false, targets.f_clk_hz, leakage_baseline());
  const PowerBreakdown g =
      evaluate_trace_power(t, e, bank, true, targets.f_clk_hz, leakage_baseline());

  CHECK_THAT(u.logic_dynamic * 1e6, WithinRel(308.2, 1e-6));
  CHECK_THAT(u.logic_leakage * 1e6, WithinRel(2.4, 1e-6));
  CHECK_THAT(u.sram_dynamic * 1e6, WithinRel(69.9, 1e-6));
  CHECK_THAT(u.sram_leakage * 1e6, WithinRel(4.2, 1e-6));
  CHECK_THAT(g.logic_dynamic * 1e6, WithinRel(211.8, 1e-6));
  CHECK_THAT(g.logic_leakage * 1e6, WithinRel(2.6, 1e-6));
  CHECK_THAT(g.sram_dynamic * 1e6, WithinRel(51.9, 1e-6));
  CHECK_THAT(g.sram_leakage * 1e6, WithinRel(4.2, 1e-6));
}

TEST_CASE("bus split between quadrants follows the measured deltas") {
  const Trace t = reference_trace();
  const ActivityEnergies e = calibrate_activity_energies(
      Table2Targets{}, trace_stats(t), BankConfig::with_macro(4));
  // 18 / (96.4 + 18): share of the gating delta seen in the SRAM quadrant
  CHECK_THAT(e.bus_sram_fraction, WithinAbs(0.1573427, 1e-6));
  CHECK_THAT(e.leak_gating_overhead, WithinRel(0.2e-6, 1e-9));
  CHECK(e.e_macro_access > 0.0);
  CHECK(e.e_logic_per_cycle > 0.0);
}

TEST_CASE("savings percentages against the ungated total") {
  const Trace t = reference_trace();
  const Table2Targets targets;
  const BankConfig bank = BankConfig::with_macro(4);
  const ActivityEnergies e =
      calibrate_activity_energies(targets, trace_stats(t), bank);
  const PowerBreakdown u =
      evaluate_trace_power(t, e, bank, false, targets.f_clk_hz, leakage_baseline());
  const PowerBreakdown g =
      evaluate_trace_power(t, e, bank, true, targets.f_clk_hz, leakage_baseline());

  const double total_u = u.total();
  auto pct = [&](double uu, double gg) { return (uu - gg) / total_u * 100.0; };
  CHECK_THAT(pct(u.logic_dynamic, g.logic_dynamic), WithinAbs(25.058, 0.01));
  CHECK_THAT(pct(u.logic_leakage, g.logic_leakage), WithinAbs(-0.052, 0.001));
  CHECK_THAT(pct(u.sram_dynamic, g.sram_dynamic), WithinAbs(4.679, 0.001));
  CHECK_THAT(pct(u.sram_leakage, g.sram_leakage), WithinAbs(0.0, 1e-12));
  const double total_pct = pct(u.total(), g.total());
  CHECK_THAT(total_pct, WithinAbs(29.685, 0.01));
  CHECK(total_pct > 29.0);
}

TEST_CASE("gating never increases dynamic power, any seed") {
  const BankConfig bank = BankConfig::with_macro(4);
  const ActivityEnergies e = calibrate_activity_energies(
      Table2Targets{}, trace_stats(reference_trace()), bank);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const Trace t = generate_trace(TraceGenConfig{}, 20'000, seed);
    const PowerBreakdown u =
        evaluate_trace_power(t, e, bank, false, 50e6, leakage_baseline());
    const PowerBreakdown g =
        evaluate_trace_power(t, e, bank, true, 50e6, leakage_baseline());
    CHECK(g.logic_dynamic <= u.logic_dynamic);
    CHECK(g.sram_dynamic <= u.sram_dynamic);
    // gating trades a fixed leakage overhead for the dynamic win
    CHECK(g.logic_leakage >= u.logic_leakage);
    CHECK(g.sram_leakage == u.sram_leakage);
  }
}

TEST_CASE("single-macro banks gain nothing from gating") {
  // 8 KiB macros, one per 8 KiB bank: with one segment per bank there is
  // no unselected segment to gate off.
  const BankConfig flat{8, 8, 1, 16};
  flat.validate();
  const ActivityEnergies e = calibrate_activity_energies(
      Table2Targets{}, trace_stats(reference_trace()), BankConfig::with_macro(4));
  const Trace t = generate_trace(TraceGenConfig{}, 10'000, 11);
  const PowerBreakdown u = evaluate_trace_power(t, e, flat, false, 50e6, leakage_baseline());
  const PowerBreakdown g = evaluate_trace_power(t, e, flat, true, 50e6, leakage_baseline());
  CHECK_THAT(g.logic_dynamic, WithinRel(u.logic_dynamic, 1e-12));
  CHECK_THAT(g.sram_dynamic, WithinRel(u.sram_dynamic, 1e-12));
}

TEST_CASE("degenerate calibration inputs are rejected") {
  const TraceStats good = trace_stats(reference_trace());
  const BankConfig bank = BankConfig::with_macro(4);

  SECTION("no cycles") {
    TraceStats s = good;
    s.n_cycles = 0;
    CHECK_THROWS_AS(calibrate_activity_energies(Table2Targets{}, s, bank), SingularSystem);
  }
  SECTION("no toggles") {
    TraceStats s = good;
    s.total_toggles = 0;
    CHECK_THROWS_AS(calibrate_activity_energies(Table2Targets{}, s, bank), SingularSystem);
  }
  SECTION("single macro per bank hides the bus energy") {
    CHECK_THROWS_AS(
        calibrate_activity_energies(Table2Targets{}, good, BankConfig{8, 8, 1, 16}),
        SingularSystem);
  }
  SECTION("gated above ungated") {
    Table2Targets t;
    t.logic_dyn_gated_uw = t.logic_dyn_ungated_uw + 1.0;
    CHECK_THROWS_AS(calibrate_activity_energies(t, good, bank), SingularSystem);
  }
  SECTION("gating may not reduce leakage") {
    Table2Targets t;
    t.logic_leak_gated_uw = 2.0; // below the ungated 2.4
    CHECK_THROWS_AS(calibrate_activity_energies(t, good, bank), SingularSystem);
  }
}

TEST_CASE("empty and inconsistent traces") {
  const BankConfig bank = BankConfig::with_macro(4);
  ActivityEnergies e;
  e.bus_sram_fraction = 0.2;

  Trace empty;
  const PowerBreakdown out =
      evaluate_trace_power(empty, e, bank, true, 50e6, leakage_baseline());
  CHECK(out.logic_dynamic == 0.0);
  CHECK(out.sram_dynamic == 0.0);
  CHECK(out.logic_leakage > 0.0);

  Trace bad;
  bad.n_cycles = 0;
  bad.records.push_back({0, 0, 0, false, 1});
  CHECK_THROWS_AS(evaluate_trace_power(bad, e, bank, true, 50e6, leakage_baseline()),
                  TraceFormatError);
}

TEST_CASE("routing congestion advisory") {
  CHECK(timing_closure_warning(BankConfig::with_macro(2), 50e6).has_value());
  CHECK_FALSE(timing_closure_warning(BankConfig::with_macro(4), 50e6).has_value());
  CHECK_FALSE(timing_closure_warning(BankConfig::with_macro(2), 10e6).has_value());
}
