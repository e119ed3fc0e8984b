#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "abbsim/activity.hpp"
#include "abbsim/calibrate.hpp"
#include "abbsim/config.hpp"
#include "abbsim/modes.hpp"
#include "abbsim/shmoo.hpp"

namespace abbsim {

inline constexpr const char* tool_version = "1.0.0";

namespace detail {

// All report numbers go through fixed printf formats: byte-identical
// reruns are a contract, so no locale- or precision-defaulted streaming.
inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

inline std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace detail

struct ReportMeta {
  std::string command;
  uint64_t config_hash = 0;
  uint64_t seed = 0;
};

// Comment block at the top of every report. Deliberately no timestamps:
// two runs with the same config and seed must produce the same bytes.
inline std::string metadata_block(const ReportMeta& meta) {
  std::string s;
  s += "# abbsim " + meta.command + "\n";
  s += "# tool_version=" + std::string(tool_version) + "\n";
  s += "# config_hash=" + detail::hash_hex(meta.config_hash) + "\n";
  s += "# seed=" + std::to_string(meta.seed) + "\n";
  return s;
}

inline void write_report_file(const std::string& dir, const std::string& name,
                              const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportIoError(dir, "cannot create output directory: " + ec.message());
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ReportIoError(path, "cannot open for writing");
  f << content;
  f.flush();
  if (!f) throw ReportIoError(path, "write failed");
}

inline std::string calibration_csv(const Calibration& cal, const ReportMeta& meta) {
  using detail::fmt;
  const DeviceParams& d = cal.device;
  std::string s = metadata_block(meta);
  s += "param,value\n";
  s += "vth0_V," + fmt("%.9e", d.vth0) + "\n";
  s += "sigma_vth_V," + fmt("%.9e", d.sigma_vth) + "\n";
  s += "gamma_body_V_per_V," + fmt("%.9e", d.gamma_body) + "\n";
  s += "n_slope," + fmt("%.9e", d.n_slope) + "\n";
  s += "i0_logic_W," + fmt("%.9e", d.i0_logic) + "\n";
  s += "i0_sram_cell_W," + fmt("%.9e", d.i0_sram_cell) + "\n";
  s += "i0_sram_periph_W," + fmt("%.9e", d.i0_sram_periph) + "\n";
  s += "k_delay," + fmt("%.9e", d.k_delay) + "\n";
  s += "alpha," + fmt("%.9e", d.alpha) + "\n";
  s += "n_crit," + fmt("%.9e", d.n_crit) + "\n";
  s += "cdyn_logic_F," + fmt("%.9e", d.cdyn_logic) + "\n";
  s += "rail_V," + fmt("%.9e", cal.rail_v) + "\n";
  s += "vth_retention_V," + fmt("%.9e", cal.vth_retention) + "\n";
  s += "od_fmin_V," + fmt("%.9e", cal.od_fmin) + "\n";
  s += "leak_scale_total_W," + fmt("%.9e", cal.leak_scale_total_w) + "\n";
  s += "active_leak_uW," + fmt("%.9e", cal.active_leak_w * 1e6) + "\n";
  s += "min_pdp_signoff_uW_per_MHz," + fmt("%.9e", cal.min_pdp_signoff) + "\n";
  return s;
}

struct TempSweepRow {
  double temp_c = 0.0;
  double sleep_uw = 0.0;
  double retention_uw = 0.0;
};

inline std::string retention_vs_temp_csv(const std::vector<TempSweepRow>& rows,
                                         const ReportMeta& meta) {
  using detail::fmt;
  std::string s = metadata_block(meta);
  s += "temp_C,sleep_uW,retention_uW\n";
  for (const TempSweepRow& r : rows)
    s += fmt("%.1f", r.temp_c) + "," + fmt("%.4f", r.sleep_uw) + "," +
         fmt("%.4f", r.retention_uw) + "\n";
  return s;
}

struct ModesReportData {
  double active_freq_mhz = 0.0;
  double active_uw = 0.0;
  double sleep_uw = 0.0;
  double retention_uw = 0.0;
  double active_over_retention = 0.0;
  double pdp_nom_uw_per_mhz = 0.0;     // model PDP at vdd_nom, fmin
  double pdp_signoff_uw_per_mhz = 0.0; // continuous min PDP at sign-off vdd
  double coremark_per_mhz = 3.19;
  EnergyReport schedule;
};

inline std::string modes_csv(const ModesReportData& d, const ReportMeta& meta) {
  using detail::fmt;
  std::string s = metadata_block(meta);
  s += "mode,freq_MHz,power_uW\n";
  s += "active," + fmt("%.3f", d.active_freq_mhz) + "," + fmt("%.4f", d.active_uw) + "\n";
  s += "sleep,0.000," + fmt("%.4f", d.sleep_uw) + "\n";
  s += "retention,0.000," + fmt("%.4f", d.retention_uw) + "\n";
  s += "# active_over_retention=" + fmt("%.2f", d.active_over_retention) + "\n";
  s += "point,pdp_uW_per_MHz,uJ_per_CM,uJ_per_CM_exact\n";
  const double cm_nom = d.pdp_nom_uw_per_mhz / d.coremark_per_mhz;
  const double cm_so = d.pdp_signoff_uw_per_mhz / d.coremark_per_mhz;
  s += "vdd_nom," + fmt("%.4f", d.pdp_nom_uw_per_mhz) + "," + fmt("%.1f", cm_nom) +
       "," + fmt("%.4f", cm_nom) + "\n";
  s += "vdd_signoff," + fmt("%.4f", d.pdp_signoff_uw_per_mhz) + "," +
       fmt("%.1f", cm_so) + "," + fmt("%.4f", cm_so) + "\n";
  s += "segment,mode,duration_s,power_uW,energy_uJ\n";
  int i = 0;
  for (const SegmentEnergy& seg : d.schedule.segments) {
    s += std::to_string(++i);
    s += ",";
    s += to_string(seg.mode.kind);
    s += "," + fmt("%.6f", seg.duration_s) + "," + fmt("%.4f", seg.power_w * 1e6) +
         "," + fmt("%.6f", seg.energy_j * 1e6) + "\n";
  }
  s += "summary,total_energy_uJ,total_time_s,average_power_uW,retention_exits\n";
  s += "totals," + fmt("%.6f", d.schedule.total_energy_j * 1e6) + "," +
       fmt("%.6f", d.schedule.total_time_s) + "," +
       fmt("%.4f", d.schedule.average_power_w * 1e6) + "," +
       std::to_string(d.schedule.retention_exits) + "\n";
  return s;
}

struct Table2Report {
  PowerBreakdown ungated;
  PowerBreakdown gated;
  TraceStats stats;
};

inline std::string table2_csv(const Table2Report& r, const ReportMeta& meta) {
  using detail::fmt;
  const double total_ungated = r.ungated.total();
  auto save_pct = [&](double ungated_w, double gated_w) {
    return (ungated_w - gated_w) / total_ungated * 100.0;
  };
  std::string s = metadata_block(meta);
  s += "# trace: cycles=" + std::to_string(r.stats.n_cycles) +
       " accesses=" + std::to_string(r.stats.n_accesses) +
       " toggles=" + std::to_string(r.stats.total_toggles) + "\n";
  s += "row,ungated_uW,gated_uW,savings_pct\n";
  auto row = [&](const char* name, double u, double g) {
    s += name;
    s += "," + fmt("%.4f", u * 1e6) + "," + fmt("%.4f", g * 1e6) + "," +
         fmt("%.1f", save_pct(u, g)) + "\n";
  };
  row("logic_dynamic", r.ungated.logic_dynamic, r.gated.logic_dynamic);
  row("logic_leakage", r.ungated.logic_leakage, r.gated.logic_leakage);
  row("sram_dynamic", r.ungated.sram_dynamic, r.gated.sram_dynamic);
  row("sram_leakage", r.ungated.sram_leakage, r.gated.sram_leakage);
  row("total", total_ungated, r.gated.total());
  return s;
}

// Matrix layout: rows run from the highest supply down, columns from the
// lowest frequency up, matching how shmoo plots are usually read.
inline std::string shmoo_csv(const ShmooGrid& g, double temp_c,
                             const ProcessCorner& corner, const ReportMeta& meta) {
  using detail::fmt;
  std::string s = metadata_block(meta);
  s += "# condition: corner=" + corner.label() + " temp_C=" + fmt("%.1f", temp_c) + "\n";
  s += "vdd_V\\f_MHz";
  for (double f : g.freq_axis) s += "," + fmt("%.0f", f / 1e6);
  s += "\n";
  for (size_t vi = g.vdd_axis.size(); vi-- > 0;) {
    s += fmt("%.3f", g.vdd_axis[vi]);
    for (size_t fi = 0; fi < g.freq_axis.size(); ++fi) {
      const ShmooCell& c = g.at(vi, fi);
      s += ",";
      s += c.pass ? "P" : (std::string("F:") + to_string(c.cause));
    }
    s += "\n";
  }
  return s;
}

inline std::string shmoo_svg(const ShmooGrid& g, double temp_c,
                             const ProcessCorner& corner) {
  using detail::fmt;
  const int cell = 18, left = 64, top = 40, bottom = 34;
  const int ncols = static_cast<int>(g.freq_axis.size());
  const int nrows = static_cast<int>(g.vdd_axis.size());
  const int width = left + ncols * cell + 16;
  const int height = top + nrows * cell + bottom;
  auto color = [](const ShmooCell& c) -> const char* {
    if (c.pass) return "#2e7d32";
    switch (c.cause) {
      case ShmooCause::PllLock: return "#9e9e9e";
      case ShmooCause::AbbLock: return "#ff9800";
      case ShmooCause::Mbist: return "#1565c0";
      case ShmooCause::Workload: return "#c62828";
      case ShmooCause::None: break;
    }
    return "#000000";
  };
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\">\n";
  s += "<text x=\"" + std::to_string(left) + "\" y=\"24\" font-family=\"monospace\" "
       "font-size=\"14\">shmoo " + corner.label() + " " + fmt("%.1f", temp_c) +
       " C (green=PASS)</text>\n";
  for (int vi = 0; vi < nrows; ++vi) {
    const int y = top + (nrows - 1 - vi) * cell;
    for (int fi = 0; fi < ncols; ++fi) {
      const int x = left + fi * cell;
      s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
           "\" width=\"" + std::to_string(cell - 1) + "\" height=\"" +
           std::to_string(cell - 1) + "\" fill=\"" +
           color(g.at(static_cast<size_t>(vi), static_cast<size_t>(fi))) + "\"/>\n";
    }
    if (vi % 2 == 0) {
      s += "<text x=\"4\" y=\"" + std::to_string(y + cell - 5) +
           "\" font-family=\"monospace\" font-size=\"10\">" +
           fmt("%.3f", g.vdd_axis[static_cast<size_t>(vi)]) + "</text>\n";
    }
  }
  for (int fi = 0; fi < ncols; fi += 2) {
    s += "<text x=\"" + std::to_string(left + fi * cell) + "\" y=\"" +
         std::to_string(top + nrows * cell + 14) +
         "\" font-family=\"monospace\" font-size=\"10\">" +
         fmt("%.0f", g.freq_axis[static_cast<size_t>(fi)] / 1e6) + "</text>\n";
  }
  s += "<text x=\"4\" y=\"" + std::to_string(top + nrows * cell + 28) +
       "\" font-family=\"monospace\" font-size=\"10\">vdd_V rows, f_MHz cols</text>\n";
  s += "</svg>\n";
  return s;
}

inline std::string signoff_csv(const CornerSweepReport& sweep,
                               const BoundingCheckResult& bounding, int n_samples,
                               const ReportMeta& meta) {
  using detail::fmt;
  std::string s = metadata_block(meta);
  s += "corner,temp_C,vdd_V,locked,bias_avg_V,locked_fmax_MHz,steps,"
       "leak_floor_uW,locked_leak_uW\n";
  for (const CornerPointResult& r : sweep.points) {
    s += r.op.corner.label() + "," + fmt("%.1f", r.op.temp_c) + "," +
         fmt("%.3f", r.op.vdd) + ",";
    if (r.locked) {
      s += "1," + fmt("%.5f", r.lock.bias.average()) + "," +
           fmt("%.4f", r.lock.locked_fmax / 1e6) + "," + std::to_string(r.lock.steps);
    } else {
      s += "0,,,";
    }
    s += "," + fmt("%.4f", r.leakage_floor_w * 1e6) + ",";
    s += r.locked ? fmt("%.4f", r.locked_leakage_w * 1e6) : "";
    s += "\n";
  }
  s += "summary,key,value\n";
  s += "summary,worst_locked_fmax_MHz," + fmt("%.4f", sweep.worst_fmax_hz / 1e6) + "\n";
  s += "summary,worst_fmax_at," + sweep.worst_fmax_at.corner.label() + "/" +
       fmt("%.1f", sweep.worst_fmax_at.temp_c) + "C/" +
       fmt("%.3f", sweep.worst_fmax_at.vdd) + "V\n";
  s += "summary,worst_leak_floor_uW," + fmt("%.4f", sweep.worst_leakage_w * 1e6) + "\n";
  s += "summary,worst_leak_at," + sweep.worst_leakage_at.corner.label() + "/" +
       fmt("%.1f", sweep.worst_leakage_at.temp_c) + "C/" +
       fmt("%.3f", sweep.worst_leakage_at.vdd) + "V\n";
  s += "summary,points_without_lock," + std::to_string(sweep.n_nolock) + "\n";
  s += "summary,bounding_samples," + std::to_string(n_samples) + "\n";
  s += "summary,bounding_ok," + std::string(bounding.bounded ? "1" : "0") + "\n";
  s += "summary,bounding_counterexamples," +
       std::to_string(bounding.counterexamples.size()) + "\n";
  return s;
}

} // namespace abbsim
