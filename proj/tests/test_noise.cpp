#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "jsnlm/noise.hpp"

namespace {

using jsnlm::Image;

struct Moments {
  double mean;
  double std;
};

Moments moments(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (v.size() - 1))};
}

Image gradient(int w, int h) {
  Image img(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) img(r, c) = (r + c) % 256;
  return img;
}

TEST(SplitMix64, KnownAnswer) {
  // Reference outputs of the published SplitMix64 for seed 0.
  jsnlm::SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.next(), 0x06C45D188009454FULL);
}

TEST(SplitMix64, UniformRanges) {
  jsnlm::SplitMix64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform();
    const double b = rng.uniform_open_zero();
    ASSERT_GE(a, 0.0);
    ASSERT_LT(a, 1.0);
    ASSERT_GT(b, 0.0);
    ASSERT_LE(b, 1.0);
  }
}

TEST(GaussianStream, FirstValuesFiniteAndDistinct) {
  const auto v = jsnlm::gaussian_stream(42, 10);
  ASSERT_EQ(v.size(), 10U);
  EXPECT_TRUE(std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }));
  EXPECT_EQ(std::set<double>(v.begin(), v.end()).size(), 10U);
}

TEST(GaussianStream, PrefixStable) {
  // Odd counts drop the second half of the last pair; the prefix is shared.
  const auto a = jsnlm::gaussian_stream(7, 11);
  const auto b = jsnlm::gaussian_stream(7, 12);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  EXPECT_THROW(jsnlm::gaussian_stream(7, 0), std::invalid_argument);
}

TEST(GaussianStream, MomentsOverMillionDraws) {
  const auto m = moments(jsnlm::gaussian_stream(2024, 1'000'000));
  EXPECT_LT(std::abs(m.mean), 0.005);
  EXPECT_LT(std::abs(m.std - 1.0), 0.005);
}

TEST(GaussianStream, KolmogorovSmirnovAgainstNormalCdf) {
  auto v = jsnlm::gaussian_stream(31337, 100'000);
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-v[i] / std::sqrt(2.0));
    d = std::max({d, std::abs((i + 1) / n - cdf), std::abs(cdf - i / n)});
  }
  EXPECT_LT(d, 0.01);
}

TEST(AddGaussianNoise, ZeroSigmaIsIdentity) {
  const Image x = gradient(16, 9);
  EXPECT_EQ(jsnlm::add_gaussian_noise(x, {0.0, 123}), x);
  EXPECT_THROW(jsnlm::add_gaussian_noise(x, {-1.0, 1}), std::invalid_argument);
}

TEST(AddGaussianNoise, Sigma20Statistics) {
  const Image x = gradient(256, 256);
  const Image y = jsnlm::add_gaussian_noise(x, {20.0, 7});
  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = y[i] - x[i];
  const auto m = moments(diff);
  EXPECT_LT(std::abs(m.mean), 0.5);
  EXPECT_NEAR(m.std, 20.0, 0.02 * 20.0);
}

TEST(AddGaussianNoise, NotClamped) {
  const Image x(64, 64, 0.0);
  const Image y = jsnlm::add_gaussian_noise(x, {20.0, 3});
  EXPECT_LT(*std::min_element(y.pixels().begin(), y.pixels().end()), 0.0);
}

TEST(AddGaussianNoise, PositionIndependentQuadrants) {
  const Image x = gradient(256, 256);
  const Image y = jsnlm::add_gaussian_noise(x, {20.0, 11});
  for (int qr = 0; qr < 2; ++qr) {
    for (int qc = 0; qc < 2; ++qc) {
      std::vector<double> diff;
      for (int r = qr * 128; r < (qr + 1) * 128; ++r)
        for (int c = qc * 128; c < (qc + 1) * 128; ++c) diff.push_back(y(r, c) - x(r, c));
      EXPECT_NEAR(moments(diff).std, 20.0, 0.05 * 20.0) << "quadrant " << qr << "," << qc;
    }
  }
}

TEST(AddGaussianNoise, Determinism) {
  const Image x = gradient(64, 64);
  const Image a = jsnlm::add_gaussian_noise(x, {20.0, 1});
  const Image b = jsnlm::add_gaussian_noise(x, {20.0, 1});
  const Image c = jsnlm::add_gaussian_noise(x, {20.0, 2});
  EXPECT_EQ(a, b);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differing += a[i] != c[i];
  EXPECT_GE(differing, static_cast<std::size_t>(0.99 * a.size()));
}

TEST(DeriveSeed, DistinctChildren) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(jsnlm::derive_seed(42, k));
  EXPECT_EQ(seen.size(), 1000U);
  EXPECT_NE(jsnlm::derive_seed(1, 0), jsnlm::derive_seed(2, 0));
}

}  // namespace
