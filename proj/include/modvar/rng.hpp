#pragma once

#include <cstdint>

namespace modvar::rng {

// Counter-based generator built on the SplitMix64 finalizer. The n-th draw
// of a stream is a pure function of (key, n), so any index range can be
// generated independently and in any order:
//
//   key    = mix(seed ^ (stream * 0xD1B54A32D192ED03) + 0x8BB84B93962EACC9)
//   draw_n = mix(key + (n + 1) * 0x9E3779B97F4A7C15)
//   mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//           z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//
// Uniform doubles take the top 53 bits: (draw >> 11) * 2^-53, in [0, 1).

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix((seed ^ (stream * 0xD1B54A32D192ED03ULL)) + 0x8BB84B93962EACC9ULL);
}

constexpr std::uint64_t draw(std::uint64_t key, std::uint64_t counter) {
  return mix(key + (counter + 1) * kGamma);
}

constexpr double uniform(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(draw(key, counter) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by multiply-shift (bound < 2^32 keeps the
/// bias below 2^-32).
constexpr std::uint64_t below(std::uint64_t key, std::uint64_t counter, std::uint64_t bound) {
  return ((draw(key, counter) >> 32) * bound) >> 32;
}

}  // namespace modvar::rng
