#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "jsnlm/image.hpp"

namespace jsnlm {

enum class KernelKind { flat, gaussian };

/// Patch taper. For the gaussian kind, alpha is the taper std in pixels and
/// defaults to patch_radius / 2 when unset.
struct KernelSpec {
  KernelKind kind = KernelKind::flat;
  std::optional<double> alpha;
};

/// Parses "flat" or "gaussian[:alpha]"; throws ConfigError otherwise.
KernelSpec parse_kernel(std::string_view text);

struct NlmParams {
  int search_radius = 15;  // 31x31 window
  int patch_radius = 3;    // 7x7 patch
  double h = 1.0;
  KernelSpec kernel;
  int threads = 1;  // 0 = hardware concurrency
};

/// Throws ParameterError unless search_radius >= patch_radius >= 1 and h > 0.
void validate(const NlmParams& params);

/// Pixel count of a (2r+1)^2 square.
constexpr int square_size(int radius) { return (2 * radius + 1) * (2 * radius + 1); }

/// Patch weights over the (2p+1)^2 patch, row-major, summing to (2p+1)^2.
class KernelTaps {
 public:
  KernelTaps(int radius, std::vector<double> taps) : radius_(radius), taps_(std::move(taps)) {}

  int radius() const { return radius_; }
  double at(int dr, int dc) const {
    return taps_[static_cast<std::size_t>((dr + radius_) * (2 * radius_ + 1) + (dc + radius_))];
  }
  const std::vector<double>& values() const { return taps_; }

 private:
  int radius_;
  std::vector<double> taps_;
};

KernelTaps kernel_taps(int patch_radius, const KernelSpec& kernel);

/// Tapered squared patch difference between the patches centered at l and k.
/// Reads outside the image are reflected.
double patch_distance(const Image& y, PixelIndex l, PixelIndex k, const KernelTaps& taps);

/// exp(-dist / h). Underflows to 0 for very large distances.
inline double nlm_weight(double dist, double h) { return std::exp(-dist / h); }

/// Per-pixel aggregates over the search window with the center pixel excluded.
struct NonCenterField {
  Image w_sum;  // W_l: sum of non-center weights
  Image z_hat;  // non-center weighted mean; y_l where w_sum < kDegenerateWeight
  Image w_max;  // largest non-center weight
};

/// Below this non-center weight mass (zero or subnormal) a pixel has no usable neighbours.
inline constexpr double kDegenerateWeight = std::numeric_limits<double>::min();

/// Brute-force aggregation: every search offset, every patch tap.
NonCenterField noncenter_aggregate(const Image& y, const NlmParams& params);

/// Summed-area-table aggregation, O(|window|) per pixel. Flat kernel only.
NonCenterField noncenter_aggregate_fast(const Image& y, const NlmParams& params);

}  // namespace jsnlm
