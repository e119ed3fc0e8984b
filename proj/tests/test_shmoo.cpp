#include <catch2/catch_amalgamated.hpp>

#include "abbsim/calibrate.hpp"
#include "abbsim/shmoo.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

using namespace abbsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Calibration& cal() {
  static const Calibration c = calibrate_models(default_anchors());
  return c;
}

std::vector<double> mhz(std::initializer_list<double> xs) {
  std::vector<double> out;
  for (double x : xs) out.push_back(x * 1e6);
  return out;
}

} // namespace

TEST_CASE("leakage floor is monotone in supply, temperature and corner speed") {
  const DeviceParams& d = cal().device;
  auto floor_at = [&](double vdd, double t, double sigma) {
    return leakage_floor(d, OperatingPoint{vdd, t, ProcessCorner{sigma}}, 1.5);
  };
  CHECK(floor_at(0.605, 25, 0) > floor_at(0.495, 25, 0));
  CHECK(floor_at(0.55, 125, 0) > floor_at(0.55, 25, 0));
  CHECK(floor_at(0.55, 25, -1) > floor_at(0.55, 25, +1));
}

TEST_CASE("corner sweep over the qualification envelope") {
  CornerSweepReport rep = corner_sweep(SignoffGrid{}, cal().device, RegulatorConfig{});
  REQUIRE(rep.points.size() == 27);
  CHECK(rep.n_nolock == 0);
  CHECK(rep.worst_fmax_hz >= 50e6);

  // worst leakage floor sits at the fast/hot/high-supply extreme
  CHECK(rep.worst_leakage_at.corner.sigma == -1.0);
  CHECK(rep.worst_leakage_at.temp_c == 125.0);
  CHECK_THAT(rep.worst_leakage_at.vdd, WithinAbs(0.605, 1e-12));
  CHECK_THAT(rep.worst_leakage_w, WithinRel(272.1e-6, 5e-3));

  // every locking point reports all-on leakage at its locked bias
  for (const CornerPointResult& r : rep.points) {
    REQUIRE(r.locked);
    CHECK(r.locked_leakage_w > r.leakage_floor_w * 0.999);
    CHECK(r.lock.locked_fmax >= 50e6);
  }
}

TEST_CASE("single-point grids are their own worst case") {
  SignoffGrid g;
  g.corners = {ProcessCorner::typical()};
  g.vdd_points = {0.55};
  g.temps_c = {25.0};
  // such a grid fails formal validation but sweeps fine
  CHECK_THROWS_AS(g.validate(), ConfigError);
  CornerSweepReport rep = corner_sweep(g, cal().device, RegulatorConfig{});
  REQUIRE(rep.points.size() == 1);
  CHECK(rep.worst_fmax_hz == rep.points[0].lock.locked_fmax);
  CHECK(rep.worst_leakage_w == rep.points[0].leakage_floor_w);
}

TEST_CASE("sweep results do not depend on grid enumeration order") {
  SignoffGrid fwd;
  SignoffGrid rev = fwd;
  std::reverse(rev.corners.begin(), rev.corners.end());
  std::reverse(rev.vdd_points.begin(), rev.vdd_points.end());
  std::reverse(rev.temps_c.begin(), rev.temps_c.end());
  CornerSweepReport a = corner_sweep(fwd, cal().device, RegulatorConfig{});
  CornerSweepReport b = corner_sweep(rev, cal().device, RegulatorConfig{});
  CHECK(a.worst_fmax_hz == b.worst_fmax_hz);
  CHECK(a.worst_leakage_w == b.worst_leakage_w);
  CHECK(a.n_nolock == b.n_nolock);
}

TEST_CASE("grid validation still demands the envelope extremes") {
  SignoffGrid g;
  g.temps_c = {-40.0, 25.0}; // no hot extreme
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = {};
  g.corners = {ProcessCorner::typical(), ProcessCorner::fast_fast()}; // no slow
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = {};
  CHECK_NOTHROW(g.validate());
  g.vdd_points.clear();
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("bounding corners bound random interior samples") {
  BoundingCheckResult res = bounding_corner_check(cal().device, BoundingRanges{}, 2000, 1);
  CHECK(res.bounded);
  CHECK(res.counterexamples.empty());
  CHECK(res.speed_bound_hz > 0.0);
  CHECK(res.leakage_bound_w > 0.0);
  // bounds are realized by the slow/cold-ish corner set, so they are finite
  CHECK(res.speed_bound_hz < 100e6);
}

TEST_CASE("zero samples is a vacuous pass, negative is rejected") {
  BoundingCheckResult res = bounding_corner_check(cal().device, BoundingRanges{}, 0, 1);
  CHECK(res.bounded);
  CHECK(res.counterexamples.empty());
  CHECK_THROWS_AS(bounding_corner_check(cal().device, BoundingRanges{}, -1, 1),
                  ConfigError);
}

TEST_CASE("a mid-range leakage anomaly defeats corner bounding") {
  DeviceParams d = cal().device;
  d.leak_temp_anomaly = 30.0;
  BoundingCheckResult res = bounding_corner_check(d, BoundingRanges{}, 2000, 1);
  CHECK_FALSE(res.bounded);
  REQUIRE_FALSE(res.counterexamples.empty());
  for (const BoundingCounterexample& c : res.counterexamples) {
    CHECK(c.metric == "leakage");
    CHECK(c.value > c.bound);
    // anomaly vanishes at the endpoints, so violations are interior
    CHECK(c.op.temp_c > -40.0);
    CHECK(c.op.temp_c < 125.0);
  }
}

TEST_CASE("shmoo scan structure at the typical corner") {
  std::vector<double> vdd{0.41, 0.44, 0.45, 0.46, 0.49, 0.50, 0.55, 0.605};
  std::vector<double> freq = mhz({5, 25, 50, 55, 80, 100});
  ShmooConfig cfg;
  cfg.sram_vmin = 0.50; // sign-off MBIST floor
  ShmooGrid g = shmoo_scan(vdd, freq, 25.0, ProcessCorner::typical(), cal().device, cfg);

  auto cell = [&](size_t vi, size_t fi) { return g.at(vi, fi); };

  // below PLL lock-in supply nothing even starts
  for (size_t fi = 0; fi < freq.size(); ++fi) {
    CHECK(cell(0, fi).cause == ShmooCause::PllLock);
    CHECK(cell(1, fi).cause == ShmooCause::PllLock);
  }
  // PLL alive but below the MBIST floor
  for (size_t vi : {size_t(2), size_t(3), size_t(4)}) {
    for (size_t fi = 0; fi < freq.size(); ++fi) {
      CHECK_FALSE(cell(vi, fi).pass);
      CHECK(cell(vi, fi).cause == ShmooCause::Mbist);
    }
  }
  // the sign-off point and nominal both pass at 50 MHz
  CHECK(cell(5, 2).pass);
  CHECK(cell(6, 2).pass);
  // nominal supply cannot hold 80 or 100 MHz: workload failure
  CHECK(cell(6, 3).pass); // 55 MHz still fits under the 75.7 MHz ceiling
  CHECK(cell(6, 4).cause == ShmooCause::Workload);
  CHECK(cell(6, 5).cause == ShmooCause::Workload);
  // high supply unlocks 80 MHz
  CHECK(cell(7, 4).pass);

  CHECK(shmoo_monotone(g));

  // PASS cells carry PDP, failures carry NaN
  CHECK(cell(6, 2).pdp_uw_per_mhz > 3.0);
  CHECK(std::isnan(cell(6, 4).pdp_uw_per_mhz));
  CHECK_THAT(cell(6, 2).pdp_uw_per_mhz, WithinAbs(4.81, 0.05));
}

TEST_CASE("minimum passing PDP at the sign-off supply lands in the window") {
  std::vector<double> vdd{0.50};
  std::vector<double> freq;
  for (int k = 1; k <= 20; ++k) freq.push_back(5e6 * k);
  ShmooConfig cfg;
  cfg.sram_vmin = 0.50;
  ShmooGrid g = shmoo_scan(vdd, freq, 25.0, ProcessCorner::typical(), cal().device, cfg);

  int n_pass = 0;
  double min_pdp = 1e9;
  size_t min_fi = 0;
  for (size_t fi = 0; fi < freq.size(); ++fi) {
    if (!g.at(0, fi).pass) continue;
    ++n_pass;
    if (g.at(0, fi).pdp_uw_per_mhz < min_pdp) {
      min_pdp = g.at(0, fi).pdp_uw_per_mhz;
      min_fi = fi;
    }
  }
  CHECK(n_pass == 12); // 5..60 MHz fit under the 60.7 MHz zero-bias ceiling
  CHECK(min_pdp >= 3.8);
  CHECK(min_pdp <= 3.9);
  // the continuous minimum sits at the 23.2 MHz rail kink; on this grid the
  // nearest sample is 25 MHz
  CHECK(freq[min_fi] == 25e6);
  CHECK_THAT(min_pdp, WithinAbs(3.8755, 5e-3));
}

TEST_CASE("regulation budget failures are classified as AbbLock") {
  std::vector<double> vdd{0.55};
  std::vector<double> freq = mhz({50, 100});
  ShmooConfig cfg;
  cfg.regulator.max_steps = 3;
  ShmooGrid g = shmoo_scan(vdd, freq, 25.0, ProcessCorner::typical(), cal().device, cfg);
  CHECK(g.at(0, 0).cause == ShmooCause::AbbLock);
  // unreachable targets throw before any step is spent: still a workload fail
  CHECK(g.at(0, 1).cause == ShmooCause::Workload);
}

TEST_CASE("shmoo axis validation") {
  ShmooConfig cfg;
  std::vector<double> good{0.5, 0.55};
  CHECK_THROWS_AS(
      shmoo_scan({}, mhz({50}), 25.0, ProcessCorner::typical(), cal().device, cfg),
      ConfigError);
  CHECK_THROWS_AS(
      shmoo_scan(good, {}, 25.0, ProcessCorner::typical(), cal().device, cfg),
      ConfigError);
  std::vector<double> unsorted{0.55, 0.5};
  CHECK_THROWS_AS(
      shmoo_scan(unsorted, mhz({50}), 25.0, ProcessCorner::typical(), cal().device, cfg),
      ConfigError);
}

TEST_CASE("cause labels") {
  CHECK(std::string(to_string(ShmooCause::PllLock)) == "PllLock");
  CHECK(std::string(to_string(ShmooCause::AbbLock)) == "AbbLock");
  CHECK(std::string(to_string(ShmooCause::Mbist)) == "Mbist");
  CHECK(std::string(to_string(ShmooCause::Workload)) == "Workload");
  CHECK(std::string(to_string(ShmooCause::None)).empty());
}
