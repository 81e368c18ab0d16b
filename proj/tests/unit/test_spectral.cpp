// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gradcheck.hpp"
#include "pdftemra/error.hpp"
#include "pdftemra/spectral/hartley_mixer.hpp"
#include "pdftemra/spectral/transform.hpp"

namespace pdftemra::spectral {
namespace {

using num::Rng;
using num::Tensor;

// Direct cas summation, independent of the library's transforms.
std::vector<double> cas_sum(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      out[k] += x[j] * (std::cos(th) + std::sin(th));
    }
  }
  return out;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(Dft, DeltaGivesAllOnes) {
  auto X = dft(std::vector<double>{1, 0, 0, 0});
  for (auto z : X) {
    EXPECT_NEAR(z.real(), 1.0, 1e-15);
    EXPECT_NEAR(z.imag(), 0.0, 1e-15);
  }
}

TEST(Dft, SmallExample) {
  auto X = dft(std::vector<double>{1, 2, 3, 4});
  const std::vector<Complex> want{{10, 0}, {-2, 2}, {-2, 0}, {-2, -2}};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(std::abs(X[i] - want[i]), 1e-12);
}

TEST(Dft, Parseval) {
  Rng rng(1);
  for (std::size_t n : {1u, 5u, 16u, 100u, 512u}) {
    auto x = random_vec(rng, n);
    auto X = dft(x);
    double lhs = 0.0, rhs = 0.0;
    for (double v : x) lhs += v * v;
    for (auto z : X) rhs += std::norm(z);
    EXPECT_NEAR(lhs, rhs / static_cast<double>(n), 1e-9) << "n=" << n;
  }
}

TEST(Dft, EmptyInputIsContractError) {
  EXPECT_THROW(dft(std::vector<double>{}), ContractError);
  EXPECT_THROW(dht(std::vector<double>{}), ContractError);
}

TEST(Dht, Examples) {
  auto d = dht(std::vector<double>{1, 0, 0, 0});
  EXPECT_LT(max_abs_diff(d, {1, 1, 1, 1}), 1e-15);
  auto h = dht(std::vector<double>{1, 2, 3, 4});
  EXPECT_LT(max_abs_diff(h, {10, -4, -2, 0}), 1e-12);
}

TEST(Dht, MatchesCasSummation) {
  Rng rng(2);
  std::vector<std::size_t> sizes;
  for (std::size_t n = 1; n <= 64; ++n) sizes.push_back(n);
  sizes.push_back(100);
  sizes.push_back(512);
  for (auto n : sizes) {
    auto x = random_vec(rng, n);
    EXPECT_LT(max_abs_diff(dht(x), cas_sum(x)), 1e-9) << "n=" << n;
  }
}

TEST(Dht, FastDftMatchesNaive) {
  Rng rng(3);
  for (std::size_t n : {1u, 2u, 3u, 7u, 31u, 32u, 33u, 64u, 100u, 512u}) {
    std::vector<Complex> x(n);
    for (auto& z : x) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto fast = dft(x);
    auto slow = dft_naive(x);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(fast[i] - slow[i]));
    EXPECT_LT(m, 1e-9) << "n=" << n;
  }
}

TEST(Dht, EqualsRealMinusImaginaryOfDft) {
  Rng rng(4);
  for (std::size_t n : {1u, 2u, 3u, 8u, 17u, 64u, 100u, 512u}) {
    for (int rep = 0; rep < 100; ++rep) {
      auto x = random_vec(rng, n);
      auto X = dft(x);
      std::vector<double> re_im(n);
      for (std::size_t i = 0; i < n; ++i) re_im[i] = X[i].real() - X[i].imag();
      ASSERT_LT(max_abs_diff(dht(x), re_im), 1e-9) << "n=" << n;
    }
  }
}

TEST(Dht, IsAnInvolutionUpToLength) {
  Rng rng(5);
  for (std::size_t n : {2u, 3u, 4u, 8u, 16u, 512u}) {
    auto x = random_vec(rng, n);
    auto twice = dht(dht(x));
    for (double& v : twice) v /= static_cast<double>(n);
    EXPECT_LT(max_abs_diff(twice, x), 1e-9) << "n=" << n;
  }
}

TEST(DhtKernel, DenseAndFftPathsAgreeWithDht) {
  Rng rng(6);
  for (std::size_t n : {5u, 64u, 65u, 100u}) {
    const std::size_t rows = 3;
    std::vector<double> block = random_vec(rng, rows * n);
    std::vector<double> want;
    for (std::size_t r = 0; r < rows; ++r) {
      auto h = dht(std::span<const double>(block.data() + r * n, n));
      want.insert(want.end(), h.begin(), h.end());
    }
    DhtKernel k(n);
    k.apply_trailing(block.data(), rows);
    EXPECT_LT(max_abs_diff(block, want), 1e-9) << "n=" << n;
  }
}

// Direct two-axis summation over [B, N, d].
Tensor naive_mix(const Tensor& x) {
  const std::size_t b = x.dim(0), n = x.dim(1), d = x.dim(2);
  Tensor out(x.shape());
  auto cas = [](std::size_t a, std::size_t m) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(a % m) / static_cast<double>(m);
    return std::cos(th) + std::sin(th);
  };
  for (std::size_t bi = 0; bi < b; ++bi)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < d; ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < d; ++j) s += x[(bi * n + i) * d + j] * cas(k * i, n) * cas(l * j, d);
        out.values()[(bi * n + k) * d + l] = s;
      }
  return out;
}

TEST(HartleyMixer, MatchesNaiveTwoAxisSum) {
  Rng rng(7);
  auto x = testing::random_like({2, 8, 6}, rng);
  auto got = hartley_mix(x);
  auto want = naive_mix(x);
  EXPECT_LT(max_abs_diff(got.storage(), want.storage()), 1e-9);
}

TEST(HartleyMixer, ZeroInZeroOutAndNoParameters) {
  auto y = hartley_mix(Tensor({1, 4, 3}));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(HartleyMixer::parameter_count(), 0u);
}

TEST(HartleyMixer, ShapeChecks) {
  HartleyMixer mix(4, 3);
  EXPECT_THROW(mix(Tensor({1, 4, 4})), DimensionError);
  EXPECT_THROW(mix(Tensor({4, 3})), DimensionError);
}

TEST(HartleyMixer, IsLinear) {
  Rng rng(8);
  auto x = testing::random_like({2, 5, 7}, rng), y = testing::random_like({2, 5, 7}, rng);
  const double a = 1.7, b = -0.3;
  auto lhs = hartley_mix(num::add(num::scale(x, a), num::scale(y, b)));
  auto rhs = num::add(num::scale(hartley_mix(x), a), num::scale(hartley_mix(y), b));
  EXPECT_LT(max_abs_diff(lhs.storage(), rhs.storage()), 1e-9);
}

TEST(HartleyMixer, AxisOrderDoesNotMatter) {
  Rng rng(9);
  const std::size_t b = 2, n = 6, d = 5;
  auto x = testing::random_like({b, n, d}, rng);
  // Sequence axis first, then hidden.
  std::vector<double> alt = x.storage();
  DhtKernel(n).apply_middle(alt.data(), b, d);
  DhtKernel(d).apply_trailing(alt.data(), b * n);
  EXPECT_LT(max_abs_diff(hartley_mix(x).storage(), alt), 1e-9);
}

TEST(HartleyMixer, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(9), d = 1 + rng.below(9);
    num::Parameter x("x", testing::random_like({2, n, d}, rng));
    auto w = testing::random_like({2, n, d}, rng);
    HartleyMixer mix(n, d);
    auto r = testing::gradcheck({&x}, [&] { return num::sum(num::tanh(num::mul(mix(num::use(x)), w))); });
    ASSERT_LT(r.rel_error, 1e-6) << "seed " << seed;
  }
}

}  // namespace
}  // namespace pdftemra::spectral
