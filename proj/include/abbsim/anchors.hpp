#pragma once

#include <map>
#include <string>

#include "abbsim/types.hpp"

namespace abbsim {

// Silicon measurement anchors the calibration must reproduce. All power
// numbers are for the reference 32 KiB / 50 MHz configuration at the
// typical corner unless stated otherwise.
struct AnchorSet {
  double retention_uw_25c = 3.2;    // full-chip retention power at 25 C
  double retention_uw_125c = 142.0; // same at 125 C
  double total_pdp_uw_per_mhz_at_vdd_nom = 4.8; // active total power / freq at vdd_nom
  double fmin_mhz = 50.0;           // application floor the regulator targets
  double signoff_vdd_min = 0.50;    // lowest supply the part is signed off at
  double vdd_nom = 0.55;
  double temp_lo_c = -40.0;
  double temp_hi_c = 125.0;

  void validate() const {
    if (retention_uw_25c <= 0 || retention_uw_125c <= retention_uw_25c)
      throw ConfigError("retention anchors must be positive and increasing in T");
    if (total_pdp_uw_per_mhz_at_vdd_nom <= 0)
      throw ConfigError("active PDP anchor must be positive");
    if (fmin_mhz <= 0) throw ConfigError("fmin anchor must be positive");
    if (signoff_vdd_min < vdd_min_v || signoff_vdd_min > vdd_nom)
      throw ConfigError("signoff vdd_min must lie in [0.3, vdd_nom]");
    if (vdd_nom < vdd_min_v || vdd_nom > vdd_max_v)
      throw ConfigError("vdd_nom outside qualified range");
    if (temp_lo_c >= temp_hi_c)
      throw ConfigError("temperature anchor range must be increasing");
  }
};

inline AnchorSet default_anchors() { return AnchorSet{}; }

// Builds an AnchorSet from flat key=value pairs (see config.hpp for the file
// syntax). Unknown keys are rejected so typos fail loudly.
inline AnchorSet anchors_from_map(const std::map<std::string, std::string>& kv) {
  AnchorSet a;
  for (const auto& [key, value] : kv) {
    double* slot = nullptr;
    if (key == "retention_uW_25C") slot = &a.retention_uw_25c;
    else if (key == "retention_uW_125C") slot = &a.retention_uw_125c;
    else if (key == "total_pdp_uW_per_MHz") slot = &a.total_pdp_uw_per_mhz_at_vdd_nom;
    else if (key == "fmin_MHz") slot = &a.fmin_mhz;
    else if (key == "signoff_vdd_min") slot = &a.signoff_vdd_min;
    else if (key == "vdd_nom") slot = &a.vdd_nom;
    else if (key == "temp_lo_C") slot = &a.temp_lo_c;
    else if (key == "temp_hi_C") slot = &a.temp_hi_c;
    else throw ConfigError("unknown anchor key '" + key + "'");
    try {
      *slot = std::stod(value);
    } catch (const std::exception&) {
      throw ConfigError("anchor '" + key + "' has non-numeric value '" + value + "'");
    }
  }
  a.validate();
  return a;
}

} // namespace abbsim
