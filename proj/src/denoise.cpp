#include "jsnlm/denoise.hpp"

#include <spdlog/spdlog.h>

#include "jsnlm/error.hpp"

namespace jsnlm {

Image apply_scheme(const Image& y, const NonCenterField& field, const NlmParams& params,
                   const CpwScheme& scheme, double sigma) {
  const ShrinkField p = shrink_fractions(scheme, y, field, sigma, params);
  return combine(field.z_hat, y, p, scheme.clamp_upper);
}

namespace {

void check_scheme(const CpwScheme& scheme) {
  if (scheme.kind == CpwKind::ljs && !scheme.block_radius) {
    throw ConfigError("ljs scheme requires a block radius");
  }
  validate(scheme);
}

}  // namespace

Image nlm_denoise(const Image& y, const NlmParams& params, const CpwScheme& scheme, double sigma) {
  check_scheme(scheme);
  return apply_scheme(y, noncenter_aggregate(y, params), params, scheme, sigma);
}

Image nlm_denoise_fast(const Image& y, const NlmParams& params, const CpwScheme& scheme,
                       double sigma) {
  check_scheme(scheme);
  if (params.kernel.kind != KernelKind::flat) {
    spdlog::info("fast NLM path needs a flat kernel; using the reference path");
    return nlm_denoise(y, params, scheme, sigma);
  }
  return apply_scheme(y, noncenter_aggregate_fast(y, params), params, scheme, sigma);
}

}  // namespace jsnlm
