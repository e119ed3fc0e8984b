// Minimal library walkthrough: calibrate, lock the bias loop, then compare
// duty-cycled schedules. Build target: abbsim_demo.

#include <cstdio>

#include "abbsim/abbsim.hpp"

int main() {
  using namespace abbsim;

  const Calibration cal = calibrate_models(default_anchors());
  const DeviceParams& d = cal.device;
  std::printf("vth0 %.4f V, body factor %.4f V/V, rail threshold %.4f V\n",
              d.vth0, d.gamma_body, cal.vth_retention);

  ModeConfig mc;
  const OperatingPoint op{cal.anchors.vdd_nom, 25.0, ProcessCorner::typical()};
  const LockResult lock = regulate_to_lock(mc.regulator, op, d);
  std::printf("locked %.3f MHz in %d steps at %.3f V reverse bias\n",
              lock.locked_fmax / 1e6, lock.steps, lock.bias.average());

  for (double active_ms : {1.0, 10.0, 100.0}) {
    ModeSchedule s;
    s.op = op;
    s.segments.push_back({PowerMode::active(mc.regulator.target_freq), active_ms * 1e-3});
    s.segments.push_back({PowerMode::retention(), 1.0 - active_ms * 1e-3});
    const EnergyReport rep = simulate_schedule(s, d, mc);
    std::printf("duty %5.1f%%: average %8.3f uW\n", active_ms / 10.0,
                rep.average_power_w * 1e6);
  }
  return 0;
}
