#include <algorithm>
#include <cmath>
#include <vector>

#include "jsnlm/error.hpp"
#include "jsnlm/nlm.hpp"
#include "jsnlm/parallel.hpp"

namespace jsnlm {

namespace {

// Row bands are fixed-size regardless of worker count, so every pixel sees
// the same summed-area table (and the same rounding) in serial and parallel
// runs. Small bands also keep prefix sums small, which limits cancellation.
constexpr int kBandRows = 32;

// Reflected copy of y with `margin` extra pixels on every side.
struct PaddedImage {
  PaddedImage(const Image& y, int margin)
      : margin(margin), width(y.width() + 2 * margin), height(y.height() + 2 * margin),
        data(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    for (int i = 0; i < height; ++i) {
      for (int j = 0; j < width; ++j) {
        data[static_cast<std::size_t>(i) * width + j] = y.get_reflected(i - margin, j - margin);
      }
    }
  }

  // Value at image coordinates (row, col), which may lie in the margin.
  const double* row_ptr(int row) const {
    return data.data() + static_cast<std::size_t>(row + margin) * width + margin;
  }

  int margin;
  int width;
  int height;
  std::vector<double> data;
};

void aggregate_band(const Image& y, const PaddedImage& pad, const NlmParams& params, int row_begin,
                    int row_end, NonCenterField& field) {
  const int r = params.search_radius;
  const int p = params.patch_radius;
  const int w = y.width();
  const int band_rows = row_end - row_begin;
  const int sat_rows = band_rows + 2 * p + 1;
  const int sat_cols = w + 2 * p + 1;

  // sat[a][b]: sum of squared differences over diff rows [0,a) x cols [0,b),
  // where diff row 0 is image row row_begin - p and diff col 0 is col -p.
  std::vector<double> sat(static_cast<std::size_t>(sat_rows) * sat_cols, 0.0);
  const auto band_pixels = static_cast<std::size_t>(band_rows) * w;
  std::vector<double> weight_sum(band_pixels, 0.0);
  std::vector<double> weighted_values(band_pixels, 0.0);
  std::vector<double> weight_max(band_pixels, 0.0);

  const int side = 2 * p + 1;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      if (dr == 0 && dc == 0) {
        continue;
      }
      for (int a = 0; a + 1 < sat_rows; ++a) {
        const int row = row_begin - p + a;
        const double* center = pad.row_ptr(row) - p;
        const double* shifted = pad.row_ptr(row + dr) - p + dc;
        const double* above = &sat[static_cast<std::size_t>(a) * sat_cols];
        double* out = &sat[static_cast<std::size_t>(a + 1) * sat_cols];
        double row_acc = 0.0;
        for (int b = 0; b + 1 < sat_cols; ++b) {
          const double diff = center[b] - shifted[b];
          row_acc += diff * diff;
          out[b + 1] = above[b + 1] + row_acc;
        }
      }

      for (int i = 0; i < band_rows; ++i) {
        const double* top = &sat[static_cast<std::size_t>(i) * sat_cols];
        const double* bottom = &sat[static_cast<std::size_t>(i + side) * sat_cols];
        const double* neighbours = pad.row_ptr(row_begin + i + dr) + dc;
        const std::size_t base = static_cast<std::size_t>(i) * w;
        for (int j = 0; j < w; ++j) {
          const double dist =
              std::max(0.0, bottom[j + side] - top[j + side] - bottom[j] + top[j]);
          const double wt = nlm_weight(dist, params.h);
          weight_sum[base + j] += wt;
          weighted_values[base + j] += wt * neighbours[j];
          weight_max[base + j] = std::max(weight_max[base + j], wt);
        }
      }
    }
  }

  for (std::size_t k = 0; k < band_pixels; ++k) {
    const std::size_t i = static_cast<std::size_t>(row_begin) * w + k;
    field.w_sum[i] = weight_sum[k];
    field.w_max[i] = weight_max[k];
    field.z_hat[i] =
        weight_sum[k] < kDegenerateWeight ? y[i] : weighted_values[k] / weight_sum[k];
  }
}

}  // namespace

NonCenterField noncenter_aggregate_fast(const Image& y, const NlmParams& params) {
  validate(params);
  if (params.kernel.kind != KernelKind::flat) {
    throw ParameterError("summed-area-table aggregation supports the flat kernel only");
  }
  const PaddedImage pad(y, params.search_radius + params.patch_radius);
  NonCenterField field{Image(y.width(), y.height()), Image(y.width(), y.height()),
                       Image(y.width(), y.height())};
  const int bands = (y.height() + kBandRows - 1) / kBandRows;
  parallel_for(static_cast<std::size_t>(bands), params.threads, [&](std::size_t band) {
    const int begin = static_cast<int>(band) * kBandRows;
    aggregate_band(y, pad, params, begin, std::min(begin + kBandRows, y.height()), field);
  });
  return field;
}

}  // namespace jsnlm
