#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace jsnlm {

struct PixelIndex {
  int row = 0;
  int col = 0;
};

/// Row-major grayscale image of doubles.
///
/// Values are kept at full precision; quantization to 8 bits only happens in
/// save_pgm(). Every stored value must be finite.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(int row, int col) const { return data_[index(row, col)]; }
  double& operator()(int row, int col) { return data_[index(row, col)]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> pixels() const { return data_; }
  std::span<double> pixels() { return data_; }

  /// Reads with whole-sample symmetric reflection for out-of-range indices.
  double get_reflected(int row, int col) const;

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Whole-sample symmetric reflection into [0, n): -1 -> 1, n -> n-2.
/// Excursions beyond one period are reflected repeatedly. n == 1 maps to 0.
int reflect_index(int i, int n);

/// Throws std::invalid_argument unless a and b have identical dimensions.
void require_same_shape(const Image& a, const Image& b, const char* what);

/// Loads a binary (P5) or ASCII (P2) PGM with maxval <= 255.
Image load_pgm(const std::filesystem::path& path);

/// Writes binary P5. Values are clamped to [0,255] and rounded half away
/// from zero.
void save_pgm(const Image& img, const std::filesystem::path& path);

/// FNV-1a over the raw bytes of the pixel buffer and the dimensions.
std::uint64_t content_hash(const Image& img);

}  // namespace jsnlm
