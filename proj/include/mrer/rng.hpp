#pragma once

#include <cstdint>

namespace mrer {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic substream derivation: fold each label into the state.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a) {
  return splitmix64(seed ^ (a * 0xD6E8FEB86659FD93ULL + 0xA5A5A5A5A5A5A5A5ULL));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
  return mix_seed(mix_seed(seed, a, b), c);
}

// Uniform double in (0,1): 53 mantissa bits, never exactly 0 or 1.
inline double uniform01(std::uint64_t bits) {
  const double v = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return v > 0.0 ? v : 0x1.0p-53;
}

}  // namespace mrer
