#include "jsnlm/cpw.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "jsnlm/error.hpp"

namespace jsnlm {

namespace {

constexpr const char* kGrammar = "one | zero | stein | max | heur[:tau] | js | ljs[:block_radius]";

[[noreturn]] void bad_scheme(std::string_view text, const std::string& why) {
  throw ConfigError("invalid CPW scheme '" + std::string(text) + "' (" + why +
                    "); valid options: " + kGrammar);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

CpwScheme parse_scheme(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  const std::string_view arg = has_arg ? text.substr(colon + 1) : std::string_view{};

  CpwScheme scheme;
  if (name == "one" || name == "zero" || name == "stein" || name == "max" || name == "js") {
    if (has_arg) {
      bad_scheme(text, "'" + std::string(name) + "' takes no parameter");
    }
    scheme.kind = name == "one"     ? CpwKind::one
                  : name == "zero"  ? CpwKind::zero
                  : name == "stein" ? CpwKind::stein
                  : name == "max"   ? CpwKind::max
                                    : CpwKind::js;
  } else if (name == "heur") {
    scheme.kind = CpwKind::heuristic;
    if (has_arg && !parse_number(arg, scheme.threshold)) {
      bad_scheme(text, "threshold is not a number");
    }
  } else if (name == "ljs") {
    scheme.kind = CpwKind::ljs;
    if (has_arg) {
      int radius = 0;
      if (!parse_number(arg, radius)) {
        bad_scheme(text, "block radius is not an integer");
      }
      scheme.block_radius = radius;
    }
  } else {
    bad_scheme(text, "unknown scheme");
  }
  try {
    validate(scheme);
  } catch (const ParameterError& e) {
    bad_scheme(text, e.what());
  }
  return scheme;
}

std::string to_string(const CpwScheme& scheme) {
  switch (scheme.kind) {
    case CpwKind::one:
      return "one";
    case CpwKind::zero:
      return "zero";
    case CpwKind::stein:
      return "stein";
    case CpwKind::max:
      return "max";
    case CpwKind::heuristic:
      return "heur:" + shortest(scheme.threshold);
    case CpwKind::js:
      return "js";
    case CpwKind::ljs:
      return scheme.block_radius ? "ljs:" + std::to_string(*scheme.block_radius) : "ljs";
  }
  return "?";
}

void validate(const CpwScheme& scheme) {
  if (!(scheme.threshold >= 0.0 && scheme.threshold <= 1.0)) {
    throw ParameterError("heuristic threshold must lie in [0,1]");
  }
  if (scheme.block_radius && square_size(*scheme.block_radius) < 3) {
    throw ParameterError("ljs block must contain at least 3 pixels");
  }
  if (!(scheme.clamp_upper > 0.0 && scheme.clamp_upper <= 1.0)) {
    throw ParameterError("clamp_upper must lie in (0,1]");
  }
}

CpwScheme with_default_block(CpwScheme scheme, int patch_radius) {
  if (scheme.kind == CpwKind::ljs && !scheme.block_radius) {
    scheme.block_radius = patch_radius;
  }
  return scheme;
}

double cpw_one() { return 1.0; }

double cpw_zero() { return 0.0; }

double cpw_stein(double sigma, int patch_size, double h) {
  if (!(h > 0.0)) {
    throw ParameterError("stein CPW needs h > 0");
  }
  return std::exp(-sigma * sigma * patch_size / h);
}

double cpw_max(std::span<const double> weights_excluding_center) {
  if (weights_excluding_center.empty()) {
    throw std::logic_error("cpw_max: no non-center weights");
  }
  return *std::max_element(weights_excluding_center.begin(), weights_excluding_center.end());
}

double cpw_heuristic(double v_max, double threshold) {
  return v_max <= threshold ? kInfiniteCpw : v_max;
}

double shrink_fraction(double v, double w_sum) {
  if (std::isinf(v)) {
    return 1.0;
  }
  if (v < kDegenerateWeight && w_sum < kDegenerateWeight) {
    return 1.0;
  }
  return v / (v + w_sum);
}

ShrinkField ShrinkField::global(double p) {
  ShrinkField f;
  f.global_ = std::clamp(p, 0.0, 1.0);
  return f;
}

ShrinkField ShrinkField::per_pixel(Image p_map) {
  for (double& p : p_map.pixels()) {
    p = std::clamp(p, 0.0, 1.0);
  }
  ShrinkField f;
  f.map_ = std::move(p_map);
  return f;
}

Image combine(const Image& z_hat, const Image& y, const ShrinkField& p, double clamp_upper) {
  require_same_shape(z_hat, y, "combine");
  if (!p.is_global()) {
    require_same_shape(p.map(), y, "combine");
  }
  Image out(y.width(), y.height());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double pi = std::min(p.at(i), clamp_upper);
    out[i] = (1.0 - pi) * z_hat[i] + pi * y[i];
  }
  return out;
}

namespace {

void require_positive_sigma(double sigma, const char* who) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError(std::string(who) + " needs a finite sigma > 0");
  }
}

// (1 - (n-2) sigma^2 / energy) clamped to [0,1]; 0 for a vanishing residual.
double james_stein_fraction(double n, double sigma, double energy) {
  if (energy < kZeroResidual) {
    return 0.0;
  }
  return std::clamp(1.0 - (n - 2.0) * sigma * sigma / energy, 0.0, 1.0);
}

}  // namespace

ShrinkField js_fraction(const Image& y, const Image& z_hat, double sigma) {
  require_same_shape(y, z_hat, "js_fraction");
  require_positive_sigma(sigma, "js_fraction");
  if (y.size() < 3) {
    throw ParameterError("js_fraction needs at least 3 pixels");
  }
  double energy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - z_hat[i];
    energy += d * d;
  }
  return ShrinkField::global(james_stein_fraction(static_cast<double>(y.size()), sigma, energy));
}

ResidualIntegral::ResidualIntegral(int width, int height)
    : width_(width), height_(height),
      table_(static_cast<std::size_t>(width + 1) * static_cast<std::size_t>(height + 1), 0.0L) {}

ResidualIntegral residual_integral(const Image& y, const Image& z_hat) {
  require_same_shape(y, z_hat, "residual_integral");
  ResidualIntegral out(y.width(), y.height());
  const auto stride = static_cast<std::size_t>(y.width() + 1);
  for (int row = 0; row < y.height(); ++row) {
    long double row_sum = 0.0L;
    const long double* above = &out.table_[static_cast<std::size_t>(row) * stride];
    long double* cur = &out.table_[static_cast<std::size_t>(row + 1) * stride];
    for (int col = 0; col < y.width(); ++col) {
      const double d = y(row, col) - z_hat(row, col);
      row_sum += d * d;
      cur[col + 1] = above[col + 1] + row_sum;
    }
  }
  return out;
}

double block_sq_norm(const ResidualIntegral& table, PixelIndex l, int block_radius) {
  const int r0 = std::max(0, l.row - block_radius);
  const int c0 = std::max(0, l.col - block_radius);
  const int r1 = std::min(table.height() - 1, l.row + block_radius);
  const int c1 = std::min(table.width() - 1, l.col + block_radius);
  return std::max(0.0, table.rect_sum(r0, c0, r1, c1));
}

int clipped_block_count(int width, int height, PixelIndex l, int block_radius) {
  const int rows = std::min(height - 1, l.row + block_radius) - std::max(0, l.row - block_radius) + 1;
  const int cols = std::min(width - 1, l.col + block_radius) - std::max(0, l.col - block_radius) + 1;
  return rows * cols;
}

ShrinkField ljs_fractions(const Image& y, const Image& z_hat, double sigma, int block_radius) {
  require_same_shape(y, z_hat, "ljs_fractions");
  require_positive_sigma(sigma, "ljs_fractions");
  if (block_radius < 1) {
    throw ParameterError("ljs block must contain at least 3 pixels");
  }
  const ResidualIntegral table = residual_integral(y, z_hat);
  Image p(y.width(), y.height());
  for (int row = 0; row < y.height(); ++row) {
    for (int col = 0; col < y.width(); ++col) {
      const PixelIndex l{row, col};
      const double n = clipped_block_count(y.width(), y.height(), l, block_radius);
      p(row, col) = james_stein_fraction(n, sigma, block_sq_norm(table, l, block_radius));
    }
  }
  return ShrinkField::per_pixel(std::move(p));
}

ShrinkField shrink_fractions(const CpwScheme& scheme, const Image& y, const NonCenterField& field,
                             double sigma, const NlmParams& params) {
  validate(scheme);
  require_same_shape(y, field.w_sum, "shrink_fractions");

  if (scheme.kind == CpwKind::js) {
    return js_fraction(y, field.z_hat, sigma);
  }
  if (scheme.kind == CpwKind::ljs) {
    if (!scheme.block_radius) {
      throw ConfigError("ljs scheme requires a block radius");
    }
    return ljs_fractions(y, field.z_hat, sigma, *scheme.block_radius);
  }

  double global_v = 0.0;
  switch (scheme.kind) {
    case CpwKind::one:
      global_v = cpw_one();
      break;
    case CpwKind::zero:
      global_v = cpw_zero();
      break;
    case CpwKind::stein:
      if (!(sigma >= 0.0)) {
        throw ParameterError("stein CPW needs sigma >= 0");
      }
      global_v = cpw_stein(sigma, square_size(params.patch_radius), params.h);
      break;
    default:
      break;
  }

  Image p(y.width(), y.height());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double v = global_v;
    if (scheme.kind == CpwKind::max) {
      v = field.w_max[i];
    } else if (scheme.kind == CpwKind::heuristic) {
      v = cpw_heuristic(field.w_max[i], scheme.threshold);
    }
    p[i] = shrink_fraction(v, field.w_sum[i]);
  }
  return ShrinkField::per_pixel(std::move(p));
}

}  // namespace jsnlm
