#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jsnlm/image.hpp"
#include "jsnlm/nlm.hpp"

namespace jsnlm {

// Center pixel weighting (CPW) schemes.
//
// A CPW v_l is the self-weight the noisy pixel receives in the NLM average.
// Splitting the average into its non-center part (W_l, z_l) and the center
// gives x_l = (1 - p_l) z_l + p_l y_l with p_l = v_l / (v_l + W_l), so every
// scheme reduces to a shrink fraction p_l in [0,1]. The James-Stein schemes
// produce p directly instead of going through a weight.

enum class CpwKind { one, zero, stein, max, heuristic, js, ljs };

struct CpwScheme {
  CpwKind kind = CpwKind::zero;
  double threshold = 0.5;            // heuristic only
  std::optional<int> block_radius;   // ljs only; resolved to the patch radius by callers
  double clamp_upper = 1.0;          // optional cap applied to p before combining
};

/// Parses `one | zero | stein | max | heur[:tau] | js | ljs[:block_radius]`.
/// Throws ConfigError listing the valid forms on failure.
CpwScheme parse_scheme(std::string_view text);

/// Canonical grammar form, e.g. "heur:0.5" or "ljs:3".
std::string to_string(const CpwScheme& scheme);

/// Throws ParameterError for out-of-range scheme parameters.
void validate(const CpwScheme& scheme);

/// Fills in block_radius = patch_radius for ljs when it was not given.
CpwScheme with_default_block(CpwScheme scheme, int patch_radius);

/// Marks a CPW that always keeps the noisy pixel (p = 1).
inline constexpr double kInfiniteCpw = std::numeric_limits<double>::infinity();

inline constexpr double kZeroResidual = 1e-12;

double cpw_one();
double cpw_zero();
double cpw_stein(double sigma, int patch_size, double h);
double cpw_max(std::span<const double> weights_excluding_center);
double cpw_heuristic(double v_max, double threshold);

/// v / (v + w_sum). Infinite v gives 1, and so does a pixel where both v and
/// w_sum are below kDegenerateWeight (nothing to average with).
double shrink_fraction(double v, double w_sum);

/// Either one fraction for the whole image or one per pixel.
class ShrinkField {
 public:
  static ShrinkField global(double p);
  static ShrinkField per_pixel(Image p_map);

  bool is_global() const { return !map_.has_value(); }
  double global_value() const { return global_; }
  const Image& map() const { return *map_; }
  double at(std::size_t i) const { return map_ ? (*map_)[i] : global_; }

 private:
  double global_ = 0.0;
  std::optional<Image> map_;
};

/// (1 - p) * z_hat + p * y per pixel, with p first capped at clamp_upper.
Image combine(const Image& z_hat, const Image& y, const ShrinkField& p, double clamp_upper = 1.0);

/// Global James-Stein fraction 1 - (m-2) sigma^2 / ||y - z_hat||^2 with m the
/// pixel count, clamped to [0,1]; 0 when the residual vanishes.
ShrinkField js_fraction(const Image& y, const Image& z_hat, double sigma);

/// Inclusive 2-D prefix sums of (y - z_hat)^2.
class ResidualIntegral {
 public:
  ResidualIntegral(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  /// Sum over rows [0,row] x cols [0,col]; -1 in either index gives 0.
  double at(int row, int col) const { return static_cast<double>(raw(row, col)); }
  double total() const { return at(height_ - 1, width_ - 1); }

  /// Sum over the inclusive rectangle [r0,r1] x [c0,c1].
  double rect_sum(int r0, int c0, int r1, int c1) const {
    return static_cast<double>(raw(r1, c1) - raw(r0 - 1, c1) - raw(r1, c0 - 1) + raw(r0 - 1, c0 - 1));
  }

 private:
  long double raw(int row, int col) const {
    return table_[static_cast<std::size_t>(row + 1) * (width_ + 1) + static_cast<std::size_t>(col + 1)];
  }

  friend ResidualIntegral residual_integral(const Image&, const Image&);

  int width_;
  int height_;
  std::vector<long double> table_;  // (height+1) x (width+1), zero first row/col; extended precision
};

ResidualIntegral residual_integral(const Image& y, const Image& z_hat);

/// Residual energy over the (2b+1)^2 block centered at l, clipped to the image.
double block_sq_norm(const ResidualIntegral& table, PixelIndex l, int block_radius);

/// Number of image pixels inside the clipped block.
int clipped_block_count(int width, int height, PixelIndex l, int block_radius);

/// Local James-Stein fractions (1 - (|B_l| - 2) sigma^2 / ||y_B - z_B||^2)^+
/// with B_l the clipped block around each pixel.
ShrinkField ljs_fractions(const Image& y, const Image& z_hat, double sigma, int block_radius);

/// Shrink fractions of any scheme given the non-center aggregates.
ShrinkField shrink_fractions(const CpwScheme& scheme, const Image& y, const NonCenterField& field,
                             double sigma, const NlmParams& params);

}  // namespace jsnlm
