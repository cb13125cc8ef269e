#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jsnlm/cpw.hpp"
#include "jsnlm/image.hpp"
#include "jsnlm/nlm.hpp"

namespace jsnlm {

using DenoiseFn =
    std::function<Image(const Image&, const NlmParams&, const CpwScheme&, double sigma)>;

struct VerifyOptions {
  std::uint64_t seed = 1;
  int cases = 4;
  // Implementation checked against the reference; defaults to nlm_denoise_fast.
  DenoiseFn fast_impl;
};

struct VerifyCheck {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Built-in oracle suite:
///  fast-vs-reference   accelerated NLM against brute force, every scheme
///  integral-vs-direct  prefix-sum block energies against direct sums
///  shrinkage-identity  center-included weighted average against (1-p) z + p y
std::vector<VerifyCheck> run_self_check(const VerifyOptions& options);

/// Uniform random image in [0, 255), deterministic in the seed.
Image random_image(int width, int height, std::uint64_t seed);

}  // namespace jsnlm
