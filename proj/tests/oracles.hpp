#pragma once

// Brute-force reference computations used as test oracles. These avoid the
// library's own reflection, distance and aggregation helpers on purpose.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "jsnlm/image.hpp"

namespace oracle {

// Mirror by repeated folding rather than modular arithmetic.
inline int mirror(int i, int n) {
  if (n == 1) {
    return 0;
  }
  while (i < 0 || i >= n) {
    if (i < 0) {
      i = -i;
    }
    if (i >= n) {
      i = 2 * (n - 1) - i;
    }
  }
  return i;
}

inline double at(const jsnlm::Image& img, int row, int col) {
  return img(mirror(row, img.height()), mirror(col, img.width()));
}

struct PixelWeights {
  std::vector<double> weights;  // non-center, raster order
  std::vector<double> values;
};

inline PixelWeights neighbour_weights(const jsnlm::Image& y, int row, int col, int search_radius,
                                      int patch_radius, double h) {
  PixelWeights out;
  for (int dr = -search_radius; dr <= search_radius; ++dr) {
    for (int dc = -search_radius; dc <= search_radius; ++dc) {
      if (dr == 0 && dc == 0) {
        continue;
      }
      double dist = 0.0;
      for (int pr = -patch_radius; pr <= patch_radius; ++pr) {
        for (int pc = -patch_radius; pc <= patch_radius; ++pc) {
          const double d = at(y, row + pr, col + pc) - at(y, row + dr + pr, col + dc + pc);
          dist += d * d;
        }
      }
      out.weights.push_back(std::exp(-dist / h));
      out.values.push_back(at(y, row + dr, col + dc));
    }
  }
  return out;
}

// Direct weighted average with the center included; center_weight receives
// the pixel's non-center weights and returns the self-weight.
inline jsnlm::Image direct_nlm(const jsnlm::Image& y, int search_radius, int patch_radius, double h,
                               const std::function<double(const std::vector<double>&)>& center_weight) {
  jsnlm::Image out(y.width(), y.height());
  for (int row = 0; row < y.height(); ++row) {
    for (int col = 0; col < y.width(); ++col) {
      const PixelWeights pw = neighbour_weights(y, row, col, search_radius, patch_radius, h);
      const double v = center_weight(pw.weights);
      double num = v * y(row, col);
      double den = v;
      for (std::size_t k = 0; k < pw.weights.size(); ++k) {
        num += pw.weights[k] * pw.values[k];
        den += pw.weights[k];
      }
      out(row, col) = num / den;
    }
  }
  return out;
}

// Non-center weighted mean (center excluded).
inline jsnlm::Image direct_z_hat(const jsnlm::Image& y, int search_radius, int patch_radius, double h) {
  return direct_nlm(y, search_radius, patch_radius, h, [](const std::vector<double>&) { return 0.0; });
}

// Sum of (y - z)^2 over the clipped rectangle [r0,r1] x [c0,c1].
inline double rect_energy(const jsnlm::Image& y, const jsnlm::Image& z, int r0, int c0, int r1, int c1) {
  double sum = 0.0;
  for (int i = std::max(0, r0); i <= std::min(y.height() - 1, r1); ++i) {
    for (int j = std::max(0, c0); j <= std::min(y.width() - 1, c1); ++j) {
      sum += (y(i, j) - z(i, j)) * (y(i, j) - z(i, j));
    }
  }
  return sum;
}

inline double max_abs_diff(const jsnlm::Image& a, const jsnlm::Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace oracle
