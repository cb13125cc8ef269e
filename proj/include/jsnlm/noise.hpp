#pragma once

#include <cstdint>
#include <vector>

#include "jsnlm/image.hpp"

namespace jsnlm {

/// SplitMix64: a 64-bit Weyl sequence passed through an avalanche finalizer.
///
/// State update is `state += 0x9E3779B97F4A7C15`; the output is mix64(state).
/// The Weyl increment is odd, so the period is exactly 2^64.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a logarithm argument.
  double uniform_open_zero() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Child seed for an independent task: mix64(seed ^ mix64(counter)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

/// Standard-normal variates via Box-Muller. Each pair consumes two
/// generator outputs u1 in (0,1] and u2 in [0,1) and yields
/// r*cos(2*pi*u2), r*sin(2*pi*u2) with r = sqrt(-2 ln u1).
std::vector<double> gaussian_stream(std::uint64_t seed, std::size_t count);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// y = x + sigma * n with n drawn in row-major order from gaussian_stream.
/// The result is not clamped.
Image add_gaussian_noise(const Image& clean, const NoiseSpec& spec);

}  // namespace jsnlm
