#pragma once

#include <cstdint>

namespace popval {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stream-seed derivation rule used by every concurrent experiment:
/// unit k of a run with master seed s is seeded with
/// splitmix64(s + (k+1) * 2^64/phi). Distinct units get decorrelated
/// engines and the mapping is reproducible across runs.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

}  // namespace popval
