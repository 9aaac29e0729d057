#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mvsc::detail {

// Hand-rolled draws on top of mt19937_64 so sampled values do not depend on
// the standard library's distribution implementations.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound).
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t bound) {
  return static_cast<std::uint64_t>(uniform01(gen) * static_cast<double>(bound)) % bound;
}

/// Standard normal via the trigonometric Box-Muller transform.
inline double gaussian(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  double u2 = uniform01(gen);
  if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Decorrelated per-stream seed (splitmix64 step).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mvsc::detail
