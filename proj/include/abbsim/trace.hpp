#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "abbsim/rng.hpp"
#include "abbsim/types.hpp"

namespace abbsim {

struct AccessRecord {
  uint64_t cycle = 0;
  int bank = 0;          // 0..3
  uint32_t address = 0;  // byte offset within the bank, < 32 KiB
  bool is_write = false;
  int data_toggles = 0;  // flipping bus bits, 0..32

  void validate() const {
    if (bank < 0 || bank > 3) throw TraceFormatError("bank out of range 0..3");
    if (address >= 32u * 1024u) throw TraceFormatError("address beyond 32 KiB bank");
    if (data_toggles < 0 || data_toggles > 32)
      throw TraceFormatError("toggle count beyond the 32-bit bus");
  }
};

struct Trace {
  std::vector<AccessRecord> records;
  uint64_t n_cycles = 0;
};

struct TraceGenConfig {
  double access_rate = 0.35;   // accesses per cycle
  double write_fraction = 0.3;
  double mean_toggles = 8.0;   // of the 32 bus bits
  double hot_fraction = 0.8;   // accesses landing in the per-bank hot window
  uint32_t hot_window_bytes = 1024;

  void validate() const {
    if (access_rate < 0 || access_rate > 1)
      throw ConfigError("access rate must lie in [0, 1]");
    if (write_fraction < 0 || write_fraction > 1)
      throw ConfigError("write fraction must lie in [0, 1]");
    if (mean_toggles < 0 || mean_toggles > 32)
      throw ConfigError("mean toggles must lie in [0, 32]");
    if (hot_fraction < 0 || hot_fraction > 1)
      throw ConfigError("hot fraction must lie in [0, 1]");
    if (hot_window_bytes == 0 || hot_window_bytes > 32u * 1024u)
      throw ConfigError("hot window must fit the bank");
  }
};

// Synthetic workload stand-in: per cycle one rate draw; on an access, fixed
// draw order bank, locality, address, write flag, then 32 per-bit toggle
// draws. The fixed order and fixed draw count make the stream reproducible
// record-for-record for a given seed.
inline Trace generate_trace(const TraceGenConfig& cfg, uint64_t n_cycles, uint64_t seed) {
  cfg.validate();
  SplitMix64 rng(seed);
  Trace t;
  t.n_cycles = n_cycles;
  const double p_bit = cfg.mean_toggles / 32.0;
  for (uint64_t c = 0; c < n_cycles; ++c) {
    if (rng.u01() >= cfg.access_rate) continue;
    AccessRecord r;
    r.cycle = c;
    r.bank = static_cast<int>(rng.next() & 3u);
    const bool hot = rng.u01() < cfg.hot_fraction;
    if (hot) {
      // Hot window: one aligned region per bank, bank b covering
      // [4096*b, 4096*b + window). Keeps hot traffic inside one 4 KiB macro.
      const uint32_t base = 4096u * static_cast<uint32_t>(r.bank);
      r.address = base + static_cast<uint32_t>(rng.next() % cfg.hot_window_bytes);
    } else {
      r.address = static_cast<uint32_t>(rng.next() % (32u * 1024u));
    }
    r.is_write = rng.u01() < cfg.write_fraction;
    int toggles = 0;
    for (int b = 0; b < 32; ++b)
      if (rng.u01() < p_bit) ++toggles;
    r.data_toggles = toggles;
    r.validate();
    t.records.push_back(r);
  }
  return t;
}

struct TraceStats {
  uint64_t n_cycles = 0;
  uint64_t n_accesses = 0;
  uint64_t n_writes = 0;
  uint64_t total_toggles = 0;
};

inline TraceStats trace_stats(const Trace& t) {
  TraceStats s;
  s.n_cycles = t.n_cycles;
  for (const AccessRecord& r : t.records) {
    ++s.n_accesses;
    if (r.is_write) ++s.n_writes;
    s.total_toggles += static_cast<uint64_t>(r.data_toggles);
  }
  return s;
}

// Text format, one record per line: `cycle bank address R|W toggles`.
// `#` opens a comment; the `# cycles=` header preserves trailing idle
// cycles that no record witnesses.
inline void write_trace(std::ostream& os, const Trace& t) {
  os << "# abbsim trace v1\n";
  os << "# generator=splitmix64\n";
  os << "# cycles=" << t.n_cycles << "\n";
  os << "# format: cycle bank address R|W toggles\n";
  for (const AccessRecord& r : t.records)
    os << r.cycle << ' ' << r.bank << ' ' << r.address << ' '
       << (r.is_write ? 'W' : 'R') << ' ' << r.data_toggles << '\n';
}

inline Trace read_trace(std::istream& is) {
  Trace t;
  bool cycles_from_header = false;
  std::string line;
  uint64_t line_no = 0;
  uint64_t last_cycle = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string body = hash == std::string::npos ? line : line.substr(0, hash);
    if (hash != std::string::npos) {
      const std::string comment = line.substr(hash + 1);
      const auto key = comment.find("cycles=");
      if (key != std::string::npos) {
        t.n_cycles = std::stoull(comment.substr(key + 7));
        cycles_from_header = true;
      }
    }
    std::istringstream ss(body);
    AccessRecord r;
    std::string rw;
    if (!(ss >> r.cycle)) continue; // blank or comment-only line
    if (!(ss >> r.bank >> r.address >> rw >> r.data_toggles))
      throw TraceFormatError("line " + std::to_string(line_no) +
                             ": expected `cycle bank address R|W toggles`");
    std::string extra;
    if (ss >> extra)
      throw TraceFormatError("line " + std::to_string(line_no) + ": trailing tokens");
    if (rw == "R") r.is_write = false;
    else if (rw == "W") r.is_write = true;
    else throw TraceFormatError("line " + std::to_string(line_no) +
                                ": access type must be R or W");
    if (!t.records.empty() && r.cycle < last_cycle)
      throw TraceFormatError("line " + std::to_string(line_no) +
                             ": cycle numbers must be non-decreasing");
    r.validate();
    last_cycle = r.cycle;
    t.records.push_back(r);
  }
  if (!cycles_from_header)
    t.n_cycles = t.records.empty() ? 0 : last_cycle + 1;
  return t;
}

inline void write_trace_file(const std::string& path, const Trace& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ReportIoError(path, "cannot open for writing");
  write_trace(f, t);
  if (!f) throw ReportIoError(path, "write failed");
}

inline Trace read_trace_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ReportIoError(path, "cannot open for reading");
  return read_trace(f);
}

} // namespace abbsim
