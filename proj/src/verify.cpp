#include "jsnlm/verify.hpp"

#include <algorithm>
#include <cmath>

#include "jsnlm/denoise.hpp"
#include "jsnlm/noise.hpp"

namespace jsnlm {

Image random_image(int width, int height, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Image img(width, height);
  for (double& v : img.pixels()) {
    v = 255.0 * rng.uniform();
  }
  return img;
}

namespace {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

VerifyCheck fast_vs_reference(const VerifyOptions& options) {
  const DenoiseFn fast = options.fast_impl ? options.fast_impl : DenoiseFn(nlm_denoise_fast);
  VerifyCheck check{"fast-vs-reference", 0.0, 1e-9, false};
  const double sigmas[] = {10.0, 20.0, 40.0};
  for (int c = 0; c < options.cases; ++c) {
    const double sigma = sigmas[c % 3];
    const Image clean = random_image(32, 32, derive_seed(options.seed, 3 * c));
    const Image noisy = add_gaussian_noise(clean, {sigma, derive_seed(options.seed, 3 * c + 1)});
    SplitMix64 rng(derive_seed(options.seed, 3 * c + 2));
    NlmParams params;
    params.search_radius = 5;
    params.patch_radius = 2;
    params.h = (0.01 + 1.99 * rng.uniform()) * sigma * sigma * square_size(params.patch_radius);
    for (const char* name : {"one", "zero", "stein", "max", "heur:0.5", "js", "ljs:2"}) {
      const CpwScheme scheme = parse_scheme(name);
      const Image ref = nlm_denoise(noisy, params, scheme, sigma);
      const Image got = fast(noisy, params, scheme, sigma);
      for (std::size_t i = 0; i < ref.size(); ++i) {
        check.max_error = std::max(check.max_error, std::abs(ref[i] - got[i]));
      }
    }
  }
  check.passed = check.max_error <= check.tolerance;
  return check;
}

VerifyCheck integral_vs_direct(const VerifyOptions& options) {
  VerifyCheck check{"integral-vs-direct", 0.0, 1e-12, false};
  for (int c = 0; c < options.cases; ++c) {
    const Image y = random_image(24, 20, derive_seed(options.seed, 100 + 2 * c));
    const Image z = random_image(24, 20, derive_seed(options.seed, 101 + 2 * c));
    const ResidualIntegral table = residual_integral(y, z);
    for (int b = 1; b <= 3; ++b) {
      for (int row = 0; row < y.height(); ++row) {
        for (int col = 0; col < y.width(); ++col) {
          double direct = 0.0;
          for (int i = std::max(0, row - b); i <= std::min(y.height() - 1, row + b); ++i) {
            for (int j = std::max(0, col - b); j <= std::min(y.width() - 1, col + b); ++j) {
              direct += (y(i, j) - z(i, j)) * (y(i, j) - z(i, j));
            }
          }
          check.max_error = std::max(
              check.max_error, relative_error(block_sq_norm(table, {row, col}, b), direct));
        }
      }
    }
  }
  check.passed = check.max_error <= check.tolerance;
  return check;
}

VerifyCheck shrinkage_identity(const VerifyOptions& options) {
  VerifyCheck check{"shrinkage-identity", 0.0, 1e-12, false};
  constexpr double sigma = 20.0;
  for (int c = 0; c < options.cases; ++c) {
    const Image y = random_image(8, 8, derive_seed(options.seed, 200 + c));
    NlmParams params;
    params.search_radius = 2;
    params.patch_radius = 1;
    params.h = sigma * sigma * square_size(params.patch_radius);
    const KernelTaps taps = kernel_taps(params.patch_radius, params.kernel);
    for (const char* name : {"one", "zero", "stein", "max", "heur:0.5"}) {
      const CpwScheme scheme = parse_scheme(name);
      const Image decomposed = nlm_denoise(y, params, scheme, sigma);
      for (int row = 0; row < y.height(); ++row) {
        for (int col = 0; col < y.width(); ++col) {
          std::vector<std::pair<double, double>> neighbours;
          double v_max = 0.0;
          for (int dr = -params.search_radius; dr <= params.search_radius; ++dr) {
            for (int dc = -params.search_radius; dc <= params.search_radius; ++dc) {
              if (dr == 0 && dc == 0) {
                continue;
              }
              const double w =
                  nlm_weight(patch_distance(y, {row, col}, {row + dr, col + dc}, taps), params.h);
              neighbours.emplace_back(w, y.get_reflected(row + dr, col + dc));
              v_max = std::max(v_max, w);
            }
          }
          double center = 0.0;
          switch (scheme.kind) {
            case CpwKind::one:
              center = 1.0;
              break;
            case CpwKind::stein:
              center = std::exp(-sigma * sigma * square_size(params.patch_radius) / params.h);
              break;
            case CpwKind::max:
              center = v_max;
              break;
            case CpwKind::heuristic:
              if (v_max <= scheme.threshold) {
                continue;  // infinite center weight; no finite direct form
              }
              center = v_max;
              break;
            default:
              break;
          }
          double num = center * y(row, col);
          double den = center;
          for (const auto& [w, value] : neighbours) {
            num += w * value;
            den += w;
          }
          check.max_error =
              std::max(check.max_error, relative_error(decomposed(row, col), num / den));
        }
      }
    }
  }
  check.passed = check.max_error <= check.tolerance;
  return check;
}

}  // namespace

std::vector<VerifyCheck> run_self_check(const VerifyOptions& options) {
  return {fast_vs_reference(options), integral_vs_direct(options), shrinkage_identity(options)};
}

}  // namespace jsnlm
