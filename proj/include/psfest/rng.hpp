#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace psfest::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Output number k of the SplitMix64 stream started at key.
constexpr std::uint64_t stream_at(std::uint64_t key, std::uint64_t k) {
  return mix64(key + (k + 1) * kGamma);
}

/// Key of an independent stream for (root, index), e.g. one per replicate.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(mix64(root) ^ stream_at(root ^ 0xD1B54A32D192ED03ULL, index));
}

/// Uniform in (0, 1]: 53 random bits, never zero.
inline double uniform_open0(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal variate number i of the stream (Box-Muller, cosine branch,
/// counters 2i and 2i+1). Random access, so parallel fills match serial ones.
inline double normal_at(std::uint64_t key, std::uint64_t i) {
  const double u1 = uniform_open0(stream_at(key, 2 * i));
  const double u2 = uniform_open0(stream_at(key, 2 * i + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace psfest::rng
