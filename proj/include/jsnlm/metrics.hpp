#pragma once

#include <limits>
#include <span>

#include "jsnlm/image.hpp"

namespace jsnlm {

/// PSNR value for identical images (MSE below 1e-12).
inline constexpr double kSaturatedPsnr = std::numeric_limits<double>::infinity();

inline bool is_saturated(double psnr_db) { return psnr_db == kSaturatedPsnr; }

/// 20 log10(255) - 10 log10(||x - x_hat||^2 / |I|), on unquantized values.
double psnr(const Image& x, const Image& x_hat);

struct SummaryStat {
  double mean_db = 0.0;
  double std_db = 0.0;  // sample standard deviation, divisor count - 1
  int count = 0;
};

/// Mean and sample std. Needs at least two values, all finite.
SummaryStat summarize(std::span<const double> psnr_db);

}  // namespace jsnlm
