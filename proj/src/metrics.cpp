#include "jsnlm/metrics.hpp"

#include <cmath>

#include "jsnlm/error.hpp"

namespace jsnlm {

double psnr(const Image& x, const Image& x_hat) {
  require_same_shape(x, x_hat, "psnr");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_hat[i];
    sq += d * d;
  }
  const double mse = sq / static_cast<double>(x.size());
  if (mse < 1e-12) {
    return kSaturatedPsnr;
  }
  return 20.0 * std::log10(255.0) - 10.0 * std::log10(mse);
}

SummaryStat summarize(std::span<const double> psnr_db) {
  if (psnr_db.size() < 2) {
    throw ParameterError("summarize needs at least two PSNR values");
  }
  double sum = 0.0;
  for (double v : psnr_db) {
    if (!std::isfinite(v)) {
      throw ParameterError("summarize: non-finite (saturated) PSNR value");
    }
    sum += v;
  }
  const double n = static_cast<double>(psnr_db.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : psnr_db) {
    ss += (v - mean) * (v - mean);
  }
  return SummaryStat{mean, std::sqrt(ss / (n - 1.0)), static_cast<int>(psnr_db.size())};
}

}  // namespace jsnlm
