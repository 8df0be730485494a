#pragma once

#include <cmath>
#include <cstdint>

namespace ots {

// Counter-based random draws: every value is a pure function of
// (seed, stream, index pair), so results do not depend on the order in
// which entities are visited or on how work is split across threads.

enum class Stream : std::uint64_t {
  Demand = 1,
  Cost = 2,
  Split = 3,
  Direction = 4,
};

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t key_hash(std::uint64_t seed, Stream stream, std::uint64_t a,
                              std::uint64_t b) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

// Uniform in [0, 1) with 53 significant bits.
inline double uniform01(std::uint64_t hash) {
  return static_cast<double>(hash >> 11) * 0x1.0p-53;
}

inline double uniform_in(double lo, double hi, std::uint64_t hash) {
  return lo + (hi - lo) * uniform01(hash);
}

// Standard normal via Box-Muller on two derived uniforms.
inline double gaussian(std::uint64_t hash) {
  double u1 = uniform01(mix64(hash ^ 0x5bf0'3635'dcf2'2a6bull));
  double u2 = uniform01(mix64(hash ^ 0x94d0'49bb'1331'11ebull));
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace ots
