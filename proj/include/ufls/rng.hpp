#pragma once

#include <cstdint>

namespace ufls::rng {

// SplitMix64 finalizer evaluated at an arbitrary counter. A draw is a pure
// function of (seed, counter), so parallel substreams are order independent
// and reproducible by construction.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Uniform variate strictly inside (0, 1), 53-bit resolution.
inline double uniform_open(std::uint64_t seed, std::uint64_t counter) {
  return (static_cast<double>(mix(seed, counter) >> 11) + 0.5) * 0x1p-53;
}

}  // namespace ufls::rng
