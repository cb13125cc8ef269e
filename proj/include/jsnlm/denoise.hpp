#pragma once

#include "jsnlm/cpw.hpp"
#include "jsnlm/image.hpp"
#include "jsnlm/nlm.hpp"

namespace jsnlm {

/// Full NLM: non-center aggregation by brute force, shrink fractions from the
/// scheme, then x = (1 - p) z + p y. sigma is only read by stein/js/ljs.
Image nlm_denoise(const Image& y, const NlmParams& params, const CpwScheme& scheme, double sigma);

/// Same contract as nlm_denoise using summed-area-table patch distances.
/// A gaussian kernel falls back to nlm_denoise with a log note.
Image nlm_denoise_fast(const Image& y, const NlmParams& params, const CpwScheme& scheme,
                       double sigma);

/// Applies a scheme to precomputed aggregates; shared by both paths and by
/// sweeps that reuse one aggregation for several schemes.
Image apply_scheme(const Image& y, const NonCenterField& field, const NlmParams& params,
                   const CpwScheme& scheme, double sigma);

}  // namespace jsnlm
