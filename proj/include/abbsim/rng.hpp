#pragma once

#include <cstdint>

namespace abbsim {

// splitmix64: the 64-bit counter-based generator of Steele, Lea and Flood.
// Pinned by name so seeded runs are identical across platforms and
// compilers. Test vectors from seed 0: 0xe220a8397b1dcdaf,
// 0x6e789e6aa1b965f4, 0x06c45d188009454f.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 significant bits.
  double u01() { return (next() >> 11) * 0x1.0p-53; }
};

} // namespace abbsim
