#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace zcurve {

/// mt19937_64's output sequence is fixed by the standard; the variate
/// helpers below are written out so draws do not depend on the standard
/// library's distribution implementations.
using Engine = std::mt19937_64;

/// Derives an independent stream seed from (seed, stream) with a splitmix64
/// finalizer.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform on the open interval (0, 1) with 53 random bits.
inline double uniform01(Engine& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Engine& rng, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

/// Standard normal by the Marsaglia polar method (second variate dropped).
inline double standard_normal(Engine& rng) noexcept {
  while (true) {
    const double a = 2.0 * uniform01(rng) - 1.0;
    const double b = 2.0 * uniform01(rng) - 1.0;
    const double s = a * a + b * b;
    if (s < 1.0 && s > 0.0) return a * std::sqrt(-2.0 * std::log(s) / s);
  }
}

}  // namespace zcurve
