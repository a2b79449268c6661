#pragma once

#include <cstdint>
#include <random>

namespace ckm {

// std::uniform_*_distribution is implementation-defined, so seeded runs
// would not reproduce across standard libraries. These helpers pin the
// bit-level mapping instead.

inline double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [lo, hi] via rejection-free modulo on 64 bits (bias
/// is below 2^-50 for the ranges used here).
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(rng() % span);
}

}  // namespace ckm
