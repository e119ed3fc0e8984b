#pragma once

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abbsim/config.hpp"
#include "abbsim/report.hpp"

namespace abbsim::cli {

namespace detail {

using abbsim::detail::fmt;

// The anomaly knob is applied after the fit: it models a silicon quirk the
// calibration anchors know nothing about, so it must not perturb them.
inline Calibration calibrated(const RunConfig& rc) {
  Calibration cal = calibrate_models(rc.anchors, rc.cal);
  cal.device.leak_temp_anomaly = rc.device_leak_temp_anomaly;
  return cal;
}

inline int cmd_calibrate(const RunConfig& rc, const ReportMeta& meta,
                         const std::string& dir, std::ostream& out) {
  const Calibration cal = calibrated(rc);
  write_report_file(dir, "calibration.csv", calibration_csv(cal, meta));
  out << "calibrated against " << fmt("%.3f", rc.anchors.vdd_nom) << " V / "
      << fmt("%.0f", rc.anchors.fmin_mhz) << " MHz anchors\n";
  out << "  vth0 = " << fmt("%.6f", cal.device.vth0) << " V, gamma_body = "
      << fmt("%.6f", cal.device.gamma_body) << " V/V, vth(rail) = "
      << fmt("%.6f", cal.vth_retention) << " V\n";
  out << "  cdyn = " << fmt("%.4f", cal.device.cdyn_logic * 1e12)
      << " pF, active leakage = " << fmt("%.4f", cal.active_leak_w * 1e6)
      << " uW, min PDP at sign-off = " << fmt("%.4f", cal.min_pdp_signoff)
      << " uW/MHz\n";
  out << "wrote " << dir << "/calibration.csv\n";
  return 0;
}

inline int cmd_power_report(const RunConfig& rc, const ReportMeta& meta,
                            const std::string& dir, std::ostream& out) {
  const Calibration cal = calibrated(rc);
  const DeviceParams& d = cal.device;
  std::vector<TempSweepRow> rows;
  for (double t = rc.anchors.temp_lo_c; t <= rc.anchors.temp_hi_c + 1e-9; t += 5.0) {
    const OperatingPoint op{rc.anchors.vdd_nom, t, ProcessCorner::typical()};
    TempSweepRow r;
    r.temp_c = t;
    r.sleep_uw = mode_power(PowerMode::sleep(), op, d, rc.modes) * 1e6;
    r.retention_uw = mode_power(PowerMode::retention(), op, d, rc.modes) * 1e6;
    rows.push_back(r);
  }
  write_report_file(dir, "retention_vs_temp.csv", retention_vs_temp_csv(rows, meta));

  const OperatingPoint op25{rc.anchors.vdd_nom, 25.0, ProcessCorner::typical()};
  const double f_act = rc.regulator.target_freq;
  const double act = mode_power(PowerMode::active(f_act), op25, d, rc.modes) * 1e6;
  const double ret = mode_power(PowerMode::retention(), op25, d, rc.modes) * 1e6;
  const double ret_hot = mode_power(
      PowerMode::retention(),
      OperatingPoint{rc.anchors.vdd_nom, rc.anchors.temp_hi_c, ProcessCorner::typical()},
      d, rc.modes) * 1e6;
  out << "retention: " << fmt("%.4f", ret) << " uW at 25 C, " << fmt("%.4f", ret_hot)
      << " uW at " << fmt("%.0f", rc.anchors.temp_hi_c) << " C\n";
  out << "active(" << fmt("%.1f", f_act / 1e6) << " MHz): " << fmt("%.4f", act)
      << " uW, active/retention = " << fmt("%.2f", act / ret) << "\n";
  out << "wrote " << dir << "/retention_vs_temp.csv\n";
  return 0;
}

inline int cmd_modes(const RunConfig& rc, const ReportMeta& meta,
                     const std::string& dir, std::ostream& out) {
  const Calibration cal = calibrated(rc);
  const DeviceParams& d = cal.device;
  const OperatingPoint op{rc.anchors.vdd_nom, 25.0, ProcessCorner::typical()};
  const double f_act = rc.regulator.target_freq;

  ModesReportData data;
  data.active_freq_mhz = f_act / 1e6;
  data.active_uw = mode_power(PowerMode::active(f_act), op, d, rc.modes) * 1e6;
  data.sleep_uw = mode_power(PowerMode::sleep(), op, d, rc.modes) * 1e6;
  data.retention_uw = mode_power(PowerMode::retention(), op, d, rc.modes) * 1e6;
  data.active_over_retention = data.active_uw / data.retention_uw;
  data.pdp_nom_uw_per_mhz = data.active_uw / data.active_freq_mhz;
  data.pdp_signoff_uw_per_mhz = cal.min_pdp_signoff;
  data.coremark_per_mhz = rc.coremark_per_mhz;
  const ModeSchedule sched = parse_schedule(rc.schedule, op, f_act);
  data.schedule = simulate_schedule(sched, d, rc.modes);
  write_report_file(dir, "modes.csv", modes_csv(data, meta));

  out << "active " << fmt("%.4f", data.active_uw) << " uW, sleep "
      << fmt("%.4f", data.sleep_uw) << " uW, retention "
      << fmt("%.4f", data.retention_uw) << " uW (active/retention "
      << fmt("%.2f", data.active_over_retention) << ")\n";
  out << "energy per CoreMark: " << fmt("%.1f", data.pdp_nom_uw_per_mhz / rc.coremark_per_mhz)
      << " uJ/CM at vdd_nom, " << fmt("%.1f", data.pdp_signoff_uw_per_mhz / rc.coremark_per_mhz)
      << " uJ/CM at sign-off vdd\n";
  out << "schedule average power: " << fmt("%.4f", data.schedule.average_power_w * 1e6)
      << " uW over " << fmt("%.3f", data.schedule.total_time_s) << " s\n";
  out << "wrote " << dir << "/modes.csv\n";
  return 0;
}

inline int cmd_shmoo(const RunConfig& rc, const ReportMeta& meta,
                     const std::string& dir, std::ostream& out) {
  const Calibration cal = calibrated(rc);
  const std::vector<double> vdd = parse_axis(rc.shmoo_vdd_axis);
  const std::vector<double> freq = parse_axis(rc.shmoo_freq_axis_mhz, 1e6);
  const ShmooGrid grid =
      shmoo_scan(vdd, freq, rc.shmoo_temp_c, rc.shmoo_corner, cal.device, rc.shmoo);
  write_report_file(dir, "shmoo.csv",
                    shmoo_csv(grid, rc.shmoo_temp_c, rc.shmoo_corner, meta));
  if (rc.shmoo_svg)
    write_report_file(dir, "shmoo.svg", shmoo_svg(grid, rc.shmoo_temp_c, rc.shmoo_corner));

  size_t pass = 0;
  for (const ShmooCell& c : grid.cells) pass += c.pass ? 1 : 0;
  out << "grid " << vdd.size() << "x" << freq.size() << ", " << pass << "/"
      << grid.cells.size() << " PASS, closure "
      << (shmoo_monotone(grid) ? "ok" : "VIOLATED") << "\n";
  out << "wrote " << dir << "/shmoo.csv" << (rc.shmoo_svg ? " and shmoo.svg" : "")
      << "\n";
  return 0;
}

inline int cmd_signoff(const RunConfig& rc, const ReportMeta& meta,
                       const std::string& dir, std::ostream& out) {
  const Calibration cal = calibrated(rc);
  rc.signoff_grid.validate();  // formal sign-off insists on all four envelope extremes
  const CornerSweepReport sweep = corner_sweep(rc.signoff_grid, cal.device, rc.regulator);
  BoundingRanges ranges;
  ranges.vdd_min = rc.anchors.vdd_nom * 0.9;
  ranges.vdd_max = rc.anchors.vdd_nom * 1.1;
  ranges.temp_min = rc.anchors.temp_lo_c;
  ranges.temp_max = rc.anchors.temp_hi_c;
  const BoundingCheckResult bounding =
      bounding_corner_check(cal.device, ranges, rc.signoff_samples, rc.seed);
  write_report_file(dir, "signoff.csv",
                    signoff_csv(sweep, bounding, rc.signoff_samples, meta));

  out << "worst locked fmax " << fmt("%.4f", sweep.worst_fmax_hz / 1e6) << " MHz at "
      << sweep.worst_fmax_at.corner.label() << "/"
      << fmt("%.0f", sweep.worst_fmax_at.temp_c) << "C/"
      << fmt("%.3f", sweep.worst_fmax_at.vdd) << "V, points without lock: "
      << sweep.n_nolock << "\n";
  out << "worst leakage floor " << fmt("%.4f", sweep.worst_leakage_w * 1e6)
      << " uW at " << sweep.worst_leakage_at.corner.label() << "/"
      << fmt("%.0f", sweep.worst_leakage_at.temp_c) << "C/"
      << fmt("%.3f", sweep.worst_leakage_at.vdd) << "V\n";
  out << "bounding corners " << (bounding.bounded ? "hold" : "VIOLATED") << " over "
      << rc.signoff_samples << " samples ("
      << bounding.counterexamples.size() << " counterexamples)\n";
  out << "wrote " << dir << "/signoff.csv\n";
  return 0;
}

inline int cmd_trace_gen(const RunConfig& rc, const ReportMeta&,
                         const std::string& dir, std::ostream& out) {
  const Trace t = generate_trace(rc.trace, rc.trace_cycles, rc.seed);
  const TraceStats st = trace_stats(t);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportIoError(dir, "cannot create output directory: " + ec.message());
  const std::string path = (std::filesystem::path(dir) / rc.trace_file).string();
  write_trace_file(path, t);
  const double denom = st.n_cycles ? static_cast<double>(st.n_cycles) : 1.0;
  out << st.n_cycles << " cycles, " << st.n_accesses << " accesses (rate "
      << fmt("%.4f", static_cast<double>(st.n_accesses) / denom) << "), "
      << st.n_writes << " writes, " << st.total_toggles << " toggles\n";
  out << "wrote " << path << "\n";
  return 0;
}

inline int cmd_table2(const RunConfig& rc, const ReportMeta& meta,
                      const std::string& dir, std::ostream& out) {
  const Table2Targets targets;
  const Trace t = generate_trace(rc.trace, rc.trace_cycles, rc.seed);
  const TraceStats stats = trace_stats(t);
  const ActivityEnergies energies = calibrate_activity_energies(targets, stats, rc.bank);

  PowerBreakdown baseline;
  baseline.logic_leakage = targets.logic_leak_ungated_uw * 1e-6;
  baseline.sram_leakage = targets.sram_leak_ungated_uw * 1e-6;
  Table2Report rep;
  rep.stats = stats;
  rep.ungated = evaluate_trace_power(t, energies, rc.bank, false, targets.f_clk_hz, baseline);
  rep.gated = evaluate_trace_power(t, energies, rc.bank, true, targets.f_clk_hz, baseline);
  write_report_file(dir, "table2.csv", table2_csv(rep, meta));

  const double total_saving =
      (rep.ungated.total() - rep.gated.total()) / rep.ungated.total() * 100.0;
  out << "bus gating saves " << fmt("%.1f", total_saving) << "% of "
      << fmt("%.4f", rep.ungated.total() * 1e6) << " uW\n";
  if (const auto warn = timing_closure_warning(rc.bank, targets.f_clk_hz))
    out << "warning: " << *warn << "\n";
  out << "wrote " << dir << "/table2.csv\n";
  return 0;
}

} // namespace detail

// In-process entry point; argv without the program name. Exit codes:
// 0 success, 1 model or I/O failure, 2 usage or configuration error.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"calibrated power/timing model of a body-biased MCU with retention SRAM"};
  app.name("abbsim");
  app.fallthrough();
  app.set_version_flag("--version", std::string(tool_version));

  std::string config_path, preset, anchors_path, out_flag, schedule_flag;
  std::string vdd_spec, freq_spec, corner_flag, trace_file_flag;
  double temp_flag = 25.0;
  uint64_t seed_flag = 0;
  long long samples_flag = 0, cycles_flag = 0;
  bool svg_flag = false;

  auto* o_config = app.add_option("--config", config_path,
                                  "flat section.key=value config file")
                       ->check(CLI::ExistingFile);
  auto* o_preset =
      app.add_option("--preset", preset, "named configuration preset")
          ->check(CLI::IsMember({"paper"}));
  auto* o_anchors = app.add_option("--anchors", anchors_path,
                                   "silicon anchor overrides file")
                        ->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", seed_flag, "PRNG seed (default 0)");
  auto* o_out = app.add_option("--out", out_flag,
                               "output directory (also env ABBSIM_OUT)");

  auto* c_cal = app.add_subcommand("calibrate", "fit the device model to the anchors");
  auto* c_power =
      app.add_subcommand("power-report", "sleep/retention power versus temperature");
  auto* c_modes = app.add_subcommand("modes", "mode powers and schedule simulation");
  auto* o_schedule = c_modes->add_option(
      "--schedule", schedule_flag, "e.g. 'active 10ms | sleep 5ms | retention 990ms'");
  auto* c_shmoo = app.add_subcommand("shmoo", "PASS/FAIL scan over (vdd, frequency)");
  auto* o_vdd = c_shmoo->add_option("--vdd", vdd_spec, "vdd axis lo:hi:step, volts");
  auto* o_freq = c_shmoo->add_option("--freq", freq_spec, "freq axis lo:hi:step, MHz");
  auto* o_corner = c_shmoo->add_option("--corner", corner_flag, "ss, tt or ff")
                       ->check(CLI::IsMember({"ss", "tt", "ff"}));
  auto* o_temp = c_shmoo->add_option("--temp", temp_flag, "die temperature, C");
  auto* o_svg = c_shmoo->add_flag("--svg", svg_flag, "also emit an SVG heat map");
  auto* c_signoff =
      app.add_subcommand("signoff", "PVT corner sweep and bounding-corner audit");
  auto* o_samples =
      c_signoff->add_option("--samples", samples_flag, "random interior PVT samples");
  auto* c_trace = app.add_subcommand("trace-gen", "seeded synthetic workload trace");
  auto* o_cycles = c_trace->add_option("--cycles", cycles_flag, "trace length in cycles");
  auto* o_trace_file =
      c_trace->add_option("--trace-file", trace_file_flag, "file name under the out dir");
  auto* c_table2 =
      app.add_subcommand("table2", "bus-gating power breakdown reproduction");
  auto* o_cycles2 = c_table2->add_option("--cycles", cycles_flag,
                                         "reference trace length in cycles");
  app.require_subcommand(1);

  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("abbsim");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << tool_version << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "abbsim: " << e.what() << "\n";
    err << "run 'abbsim --help' for usage\n";
    return 2;
  }

  try {
    ConfigMap m;
    if (o_preset->count() && preset == "paper") apply_paper_preset(m);
    if (o_config->count()) merge_config_file(m, config_path);
    if (o_anchors->count()) merge_anchor_file(m, anchors_path);
    if (o_seed->count()) m.set("run.seed", std::to_string(seed_flag));
    if (o_schedule->count()) m.set("modes.schedule", schedule_flag);
    if (o_vdd->count()) m.set("shmoo.vdd_axis", vdd_spec);
    if (o_freq->count()) m.set("shmoo.freq_axis_mhz", freq_spec);
    if (o_corner->count()) m.set("shmoo.corner", corner_flag);
    if (o_temp->count()) m.set("shmoo.temp_C", abbsim::detail::fmt("%.10g", temp_flag));
    if (o_svg->count()) m.set("shmoo.svg", "1");
    if (o_samples->count()) m.set("signoff.samples", std::to_string(samples_flag));
    if (o_cycles->count() || o_cycles2->count())
      m.set("trace.cycles", std::to_string(cycles_flag));
    if (o_trace_file->count()) m.set("trace.file", trace_file_flag);

    const uint64_t hash = m.hash();
    const RunConfig rc = build_run_config(m);

    std::string out_dir = rc.out_dir;
    if (const char* env = std::getenv("ABBSIM_OUT"))
      if (*env) out_dir = env;
    if (o_out->count()) out_dir = out_flag;

    ReportMeta meta;
    meta.config_hash = hash;
    meta.seed = rc.seed;
    if (app.got_subcommand(c_cal)) {
      meta.command = "calibrate";
      return detail::cmd_calibrate(rc, meta, out_dir, out);
    }
    if (app.got_subcommand(c_power)) {
      meta.command = "power-report";
      return detail::cmd_power_report(rc, meta, out_dir, out);
    }
    if (app.got_subcommand(c_modes)) {
      meta.command = "modes";
      return detail::cmd_modes(rc, meta, out_dir, out);
    }
    if (app.got_subcommand(c_shmoo)) {
      meta.command = "shmoo";
      return detail::cmd_shmoo(rc, meta, out_dir, out);
    }
    if (app.got_subcommand(c_signoff)) {
      meta.command = "signoff";
      return detail::cmd_signoff(rc, meta, out_dir, out);
    }
    if (app.got_subcommand(c_trace)) {
      meta.command = "trace-gen";
      return detail::cmd_trace_gen(rc, meta, out_dir, out);
    }
    if (app.got_subcommand(c_table2)) {
      meta.command = "table2";
      return detail::cmd_table2(rc, meta, out_dir, out);
    }
    err << "abbsim: no subcommand selected\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "abbsim: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    err << "abbsim: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "abbsim: " << e.what() << "\n";
    return 1;
  }
}

} // namespace abbsim::cli
