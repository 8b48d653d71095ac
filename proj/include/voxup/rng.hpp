#pragma once

#include <cmath>
#include <cstdint>

namespace voxup {

/// Counter-based pseudo-random primitives. Every draw is a pure function of
/// (seed, stream, counter), so results are independent of evaluation order
/// and of how work is partitioned across threads.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Named sub-stream derived from a root seed.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream ^ 0xA0761D6478BD642Full));
}

inline std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(seed ^ splitmix64(counter + 0x2545F4914F6CDD1Dull));
}

/// Uniform double in [0, 1).
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return double(counter_u64(seed, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two counter draws; fully portable.
inline double counter_normal(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = (double((counter_u64(seed, 2 * counter) >> 11)) + 0.5) * 0x1.0p-53;
  const double u2 = counter_uniform(seed, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586477 * u2);
}

}  // namespace voxup
