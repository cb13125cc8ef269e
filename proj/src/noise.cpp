#include "jsnlm/noise.hpp"

#include <cmath>
#include <numbers>

#include "jsnlm/error.hpp"

namespace jsnlm {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  return SplitMix64::mix64(seed ^ SplitMix64::mix64(counter));
}

std::vector<double> gaussian_stream(std::uint64_t seed, std::size_t count) {
  if (count == 0) {
    throw ParameterError("gaussian_stream: count must be positive");
  }
  SplitMix64 rng(seed);
  std::vector<double> out;
  out.reserve(count + 1);
  while (out.size() < count) {
    const double u1 = rng.uniform_open_zero();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out.push_back(r * std::cos(theta));
    out.push_back(r * std::sin(theta));
  }
  out.resize(count);
  return out;
}

Image add_gaussian_noise(const Image& clean, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw ParameterError("noise sigma must be a finite non-negative number");
  }
  Image noisy = clean;
  if (spec.sigma == 0.0) {
    return noisy;
  }
  const std::vector<double> n = gaussian_stream(spec.seed, clean.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    noisy[i] += spec.sigma * n[i];
  }
  return noisy;
}

}  // namespace jsnlm
