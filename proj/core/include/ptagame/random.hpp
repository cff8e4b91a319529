#pragma once

#include <cstdint>
#include <random>

namespace ptg {

/// Uniform integer in [0, n) by rejection on raw 64-bit draws. Unlike
/// std::uniform_int_distribution the result is the same on every standard
/// library. Precondition: n > 0.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  std::uint64_t x;
  do x = rng();
  while (x > limit);
  return x % n;
}

/// Independent stream for the i-th task under a base seed.
inline std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace ptg
