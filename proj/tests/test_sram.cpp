#include <catch2/catch_amalgamated.hpp>

#include "abbsim/calibrate.hpp"
#include "abbsim/sram.hpp"

using namespace abbsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Calibration& cal() {
  static const Calibration c = calibrate_models(default_anchors());
  return c;
}

SramPowerState in_phase(SramPhase ph) {
  SramPowerState s;
  s.phase = ph;
  s.contents_valid = (ph == SramPhase::Active || ph == SramPhase::Retention);
  return s;
}

} // namespace

TEST_CASE("exhaustive transition matrix") {
  const SramPhase A = SramPhase::Active;
  const SramPhase R = SramPhase::Retention;
  const SramPhase P = SramPhase::PowerDown;
  const SramPhase W = SramPhase::WakingUp;

  SECTION("self transitions are no-ops") {
    for (SramPhase ph : {A, R, P}) {
      SramPowerState s = in_phase(ph);
      SramPowerState next = request_transition(s, ph);
      CHECK(next.phase == s.phase);
      CHECK(next.contents_valid == s.contents_valid);
    }
  }

  SECTION("active to retention keeps contents") {
    SramPowerState next = request_transition(in_phase(A), R);
    CHECK(next.phase == R);
    CHECK(next.contents_valid);
  }

  SECTION("any entry into power-down clears contents") {
    for (SramPhase from : {A, R}) {
      SramPowerState next = request_transition(in_phase(from), P);
      CHECK(next.phase == P);
      CHECK_FALSE(next.contents_valid);
    }
  }

  SECTION("retention wake preserves contents") {
    SramPowerState next = request_transition(in_phase(R), A);
    CHECK(next.phase == W);
    CHECK(next.wake_stage == 0);
    CHECK(next.contents_valid);
  }

  SECTION("power-down wake comes up with invalid contents") {
    SramPowerState next = request_transition(in_phase(P), A);
    CHECK(next.phase == W);
    CHECK_FALSE(next.contents_valid);
  }

  SECTION("power-down cannot re-enter retention") {
    CHECK_THROWS_AS(request_transition(in_phase(P), R), IllegalTransition);
  }

  SECTION("waking-up is never a valid request target") {
    for (SramPhase from : {A, R, P, W}) {
      CHECK_THROWS_AS(request_transition(in_phase(from), W), IllegalTransition);
    }
  }

  SECTION("requests are rejected mid-wake") {
    for (SramPhase to : {A, R, P}) {
      CHECK_THROWS_AS(request_transition(in_phase(W), to), IllegalTransition);
    }
  }
}

TEST_CASE("wake staging walks all segments then settles") {
  SramMacroConfig cfg; // 8 segments
  SramPowerState s = request_transition(in_phase(SramPhase::Retention), SramPhase::Active);
  for (int stage = 1; stage < 8; ++stage) {
    s = advance_wake(s, cfg);
    CHECK(s.phase == SramPhase::WakingUp);
    CHECK(s.wake_stage == stage);
  }
  s = advance_wake(s, cfg);
  CHECK(s.phase == SramPhase::Active);
  CHECK(s.contents_valid);

  CHECK_THROWS_AS(advance_wake(s, cfg), IllegalTransition);
}

TEST_CASE("write marks contents valid again after a cold wake") {
  SramMacroConfig cfg;
  SramPowerState s = request_transition(in_phase(SramPhase::PowerDown), SramPhase::Active);
  for (int i = 0; i < 8; ++i) s = advance_wake(s, cfg);
  CHECK(s.phase == SramPhase::Active);
  CHECK_FALSE(s.contents_valid);
  s = mark_written(s);
  CHECK(s.contents_valid);

  CHECK_THROWS_AS(mark_written(in_phase(SramPhase::Retention)), IllegalTransition);
}

TEST_CASE("wake profile at defaults") {
  SramMacroConfig cfg;
  WakeProfile w = wake_sequence_profile(cfg, 0.55);
  CHECK(w.stage_peak_a.size() == 8);
  CHECK_THAT(w.total_duration_s, WithinRel(200e-9, 1e-12));
  CHECK_THAT(w.stage_interval_s, WithinRel(25e-9, 1e-12));
  for (double tau : w.stage_tau_s) CHECK_THAT(tau, WithinRel(5e-9, 1e-12));
  for (double peak : w.stage_peak_a) {
    CHECK_THAT(peak, WithinRel(2.2e-3, 1e-12)); // 20 pF * 0.55 V / 5 ns
    CHECK(peak <= cfg.current_limit);
  }
}

TEST_CASE("wake duration scales with segment count, spacing fixed") {
  SramMacroConfig cfg;
  cfg.n_power_segments = 1;
  CHECK_THAT(wake_sequence_profile(cfg, 0.55).total_duration_s, WithinRel(25e-9, 1e-12));
  cfg.n_power_segments = 16;
  CHECK_THAT(wake_sequence_profile(cfg, 0.55).total_duration_s, WithinRel(400e-9, 1e-12));
}

TEST_CASE("halving the segment capacitance halves the in-rush peak") {
  SramMacroConfig cfg;
  cfg.segment_capacitance = 10e-12;
  WakeProfile w = wake_sequence_profile(cfg, 0.55);
  CHECK_THAT(w.stage_peak_a.front(), WithinRel(1.1e-3, 1e-12));
}

TEST_CASE("tight current budgets stretch tau until the schedule breaks") {
  SramMacroConfig cfg;

  SECTION("budget-bound tau pins the peak exactly at the limit") {
    cfg.current_limit = 0.6e-3; // tau_budget = 18.33 ns, still under 25 ns
    WakeProfile w = wake_sequence_profile(cfg, 0.55);
    CHECK(w.stage_tau_s.front() > 5e-9);
    CHECK_THAT(w.stage_peak_a.front(), WithinRel(cfg.current_limit, 1e-12));
  }

  SECTION("infeasible once tau exceeds the stage interval") {
    cfg.current_limit = 0.1e-3; // tau_budget = 110 ns > 25 ns
    CHECK_THROWS_AS(wake_sequence_profile(cfg, 0.55), CurrentBudgetInfeasible);
  }
}

TEST_CASE("macro power ratios across states") {
  SramMacroConfig cfg;
  const OperatingPoint op{0.55, 25.0, ProcessCorner::typical()};
  const BiasPair rail{1.5, 1.5};
  const DeviceParams& d = cal().device;

  const double active = macro_power(cfg, in_phase(SramPhase::Active), op, rail, d);
  const double ret = macro_power(cfg, in_phase(SramPhase::Retention), op, rail, d);
  const double pd = macro_power(cfg, in_phase(SramPhase::PowerDown), op, rail, d);

  CHECK(ret < active);
  CHECK(pd < ret);
  // cell array is 1 part in 2.5 of macro leakage
  CHECK_THAT(ret / active, WithinRel(0.4, 1e-12));
  // power-down leaves exactly the residual fraction
  CHECK_THAT(pd / active, WithinRel(d.pd_residual, 1e-12));

  // waking-up is billed at the active rate
  const double waking = macro_power(cfg, in_phase(SramPhase::WakingUp), op, rail, d);
  CHECK(waking == active);
}

TEST_CASE("macro power is proportional to macro size") {
  SramMacroConfig small;
  small.size_kib = 4;
  SramMacroConfig big;
  big.size_kib = 8;
  const OperatingPoint op{0.55, 25.0, ProcessCorner::typical()};
  const double a = macro_power(small, in_phase(SramPhase::Active), op, {}, cal().device);
  const double b = macro_power(big, in_phase(SramPhase::Active), op, {}, cal().device);
  CHECK_THAT(b / a, WithinRel(2.0, 1e-12));
}

TEST_CASE("retention controller area overhead") {
  SramMacroConfig cfg;
  CHECK_THAT(retention_area_overhead_pct(cfg), WithinAbs(2.1, 1e-9));

  double last = 100.0;
  for (int size : {1, 2, 4, 8}) {
    SramMacroConfig c;
    c.size_kib = size;
    double pct = retention_area_overhead_pct(c);
    CHECK(pct < last); // bigger macros amortize the fixed block better
    last = pct;
  }

  SramMacroConfig eight;
  eight.size_kib = 8;
  CHECK_THAT(retention_area_overhead_pct(eight), WithinAbs(1.06114, 1e-4));
}

TEST_CASE("bank composition validation") {
  CHECK_NOTHROW(BankConfig::with_macro(4).validate());
  BankConfig b;
  b.macro_size_kib = 3;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  b = {};
  b.macros_per_bank = 7;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  // 8 KiB macros, one per 8 KiB bank, sixteen banks: a legal flat layout
  CHECK_NOTHROW((BankConfig{8, 8, 1, 16}).validate());
}

TEST_CASE("macro config validation") {
  SramMacroConfig cfg;
  cfg.size_kib = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.n_power_segments = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.current_limit = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
