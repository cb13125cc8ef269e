#include "jsnlm/nlm.hpp"

#include <algorithm>
#include <charconv>
#include <string>
#include <cmath>
#include <numeric>

#include "jsnlm/error.hpp"
#include "jsnlm/parallel.hpp"

namespace jsnlm {

void validate(const NlmParams& params) {
  if (params.patch_radius < 1) {
    throw ParameterError("patch radius must be >= 1");
  }
  if (params.search_radius < params.patch_radius) {
    throw ParameterError("search radius must be >= patch radius");
  }
  if (!(params.h > 0.0) || !std::isfinite(params.h)) {
    throw ParameterError("temperature h must be a finite positive number");
  }
}

KernelSpec parse_kernel(std::string_view text) {
  if (text == "flat") {
    return KernelSpec{};
  }
  if (text.substr(0, 8) == "gaussian") {
    KernelSpec spec{KernelKind::gaussian, std::nullopt};
    if (text.size() > 8) {
      double alpha = 0.0;
      const std::string_view arg = text.substr(9);
      const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), alpha);
      if (text[8] != ':' || ec != std::errc() || ptr != arg.data() + arg.size() || !(alpha > 0.0)) {
        throw ConfigError("invalid kernel '" + std::string(text) +
                          "'; expected flat or gaussian[:alpha] with alpha > 0");
      }
      spec.alpha = alpha;
    }
    return spec;
  }
  throw ConfigError("invalid kernel '" + std::string(text) + "'; expected flat or gaussian[:alpha]");
}

KernelTaps kernel_taps(int patch_radius, const KernelSpec& kernel) {
  if (patch_radius < 1) {
    throw ParameterError("patch radius must be >= 1");
  }
  const int side = 2 * patch_radius + 1;
  const auto count = static_cast<std::size_t>(side * side);
  if (kernel.kind == KernelKind::flat) {
    return KernelTaps(patch_radius, std::vector<double>(count, 1.0));
  }

  const double alpha = kernel.alpha.value_or(patch_radius / 2.0);
  if (!(alpha > 0.0)) {
    throw ParameterError("gaussian kernel alpha must be > 0");
  }
  std::vector<double> taps;
  taps.reserve(count);
  for (int dr = -patch_radius; dr <= patch_radius; ++dr) {
    for (int dc = -patch_radius; dc <= patch_radius; ++dc) {
      taps.push_back(std::exp(-(dr * dr + dc * dc) / (2.0 * alpha * alpha)));
    }
  }
  const double scale = static_cast<double>(count) / std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) {
    t *= scale;
  }
  return KernelTaps(patch_radius, std::move(taps));
}

double patch_distance(const Image& y, PixelIndex l, PixelIndex k, const KernelTaps& taps) {
  const int p = taps.radius();
  double sum = 0.0;
  for (int dr = -p; dr <= p; ++dr) {
    for (int dc = -p; dc <= p; ++dc) {
      const double diff = y.get_reflected(l.row + dr, l.col + dc) -
                          y.get_reflected(k.row + dr, k.col + dc);
      sum += taps.at(dr, dc) * diff * diff;
    }
  }
  return sum;
}

namespace {

void finalize_pixel(const Image& y, std::size_t i, double weight_sum, double weighted_values,
                    double weight_max, NonCenterField& field) {
  field.w_sum[i] = weight_sum;
  field.w_max[i] = weight_max;
  field.z_hat[i] = weight_sum < kDegenerateWeight ? y[i] : weighted_values / weight_sum;
}

NonCenterField empty_field(const Image& y) {
  return NonCenterField{Image(y.width(), y.height()), Image(y.width(), y.height()),
                        Image(y.width(), y.height())};
}

}  // namespace

NonCenterField noncenter_aggregate(const Image& y, const NlmParams& params) {
  validate(params);
  const KernelTaps taps = kernel_taps(params.patch_radius, params.kernel);
  const int r = params.search_radius;
  NonCenterField field = empty_field(y);

  parallel_for(static_cast<std::size_t>(y.height()), params.threads, [&](std::size_t row_index) {
    const int row = static_cast<int>(row_index);
    for (int col = 0; col < y.width(); ++col) {
      double weight_sum = 0.0;
      double weighted_values = 0.0;
      double weight_max = 0.0;
      for (int dr = -r; dr <= r; ++dr) {
        for (int dc = -r; dc <= r; ++dc) {
          if (dr == 0 && dc == 0) {
            continue;
          }
          const PixelIndex k{row + dr, col + dc};
          const double w = nlm_weight(patch_distance(y, {row, col}, k, taps), params.h);
          weight_sum += w;
          weighted_values += w * y.get_reflected(k.row, k.col);
          weight_max = std::max(weight_max, w);
        }
      }
      finalize_pixel(y, row_index * static_cast<std::size_t>(y.width()) + static_cast<std::size_t>(col),
                     weight_sum, weighted_values, weight_max, field);
    }
  });
  return field;
}

}  // namespace jsnlm
