// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/spectral/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "pdftemra/error.hpp"
#include "pdftemra/num/kernels.hpp"

namespace pdftemra::spectral {

namespace {

constexpr std::size_t kNaiveBelow = 32;

// exp(-2 pi i num / den) with the angle reduced exactly before scaling.
Complex unit_root(std::size_t num, std::size_t den) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(num % den) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

void fft_radix2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<Complex> roots(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    roots[k] = unit_root(k, n);
    if (inverse) roots[k] = std::conj(roots[k]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + len / 2] * roots[k * step];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<Complex> bluestein(std::span<const Complex> x) {
  const std::size_t n = x.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);
  // chirp_k = exp(-i pi k^2 / n) = unit_root(k^2 mod 2n, 2n)
  std::vector<Complex> chirp(n);
  for (std::size_t k = 0; k < n; ++k) chirp[k] = unit_root((k * k) % (2 * n), 2 * n);
  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  fft_radix2(a, false);
  fft_radix2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_radix2(a, true);
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] / static_cast<double>(m) * chirp[k];
  return out;
}

}  // namespace

std::vector<Complex> dft_naive(std::span<const Complex> x) {
  if (x.empty()) throw ContractError("dft of empty input");
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    Complex s{};
    for (std::size_t j = 0; j < n; ++j) s += x[j] * unit_root(t * j, n);
    out[t] = s;
  }
  return out;
}

std::vector<Complex> dft(std::span<const Complex> x) {
  if (x.empty()) throw ContractError("dft of empty input");
  const std::size_t n = x.size();
  if (std::has_single_bit(n)) {
    std::vector<Complex> a(x.begin(), x.end());
    fft_radix2(a, false);
    return a;
  }
  if (n < kNaiveBelow) return dft_naive(x);
  return bluestein(x);
}

std::vector<Complex> dft(std::span<const double> x) {
  std::vector<Complex> c(x.begin(), x.end());
  return dft(std::span<const Complex>(c));
}

std::vector<double> dht(std::span<const double> x) {
  const auto spectrum = dft(x);
  std::vector<double> out(spectrum.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = spectrum[k].real() - spectrum[k].imag();
  return out;
}

DhtKernel::DhtKernel(std::size_t n) : n_(n) {
  if (n == 0) throw ContractError("Hartley kernel of length 0");
  if (n <= kDenseLimit) {
    cas_.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
        cas_[k * n + j] = std::cos(angle) + std::sin(angle);
      }
    }
  }
}

void DhtKernel::apply_trailing(double* data, std::size_t rows) const {
  if (cas_.empty()) {
    for (std::size_t r = 0; r < rows; ++r) {
      double* row = data + r * n_;
      const auto out = dht(std::span<const double>(row, n_));
      std::copy(out.begin(), out.end(), row);
    }
    return;
  }
  std::vector<double> block(data, data + rows * n_);
  std::fill(data, data + rows * n_, 0.0);
  num::kernels::gemm_nn(rows, n_, n_, block.data(), cas_.data(), data);
}

void DhtKernel::apply_middle(double* data, std::size_t batches, std::size_t width) const {
  std::vector<double> block(n_ * width);
  std::vector<double> line(n_);
  for (std::size_t b = 0; b < batches; ++b) {
    double* base = data + b * n_ * width;
    std::copy(base, base + n_ * width, block.begin());
    if (cas_.empty()) {
      for (std::size_t c = 0; c < width; ++c) {
        for (std::size_t i = 0; i < n_; ++i) line[i] = block[i * width + c];
        const auto out = dht(line);
        for (std::size_t i = 0; i < n_; ++i) base[i * width + c] = out[i];
      }
      continue;
    }
    std::fill(base, base + n_ * width, 0.0);
    num::kernels::gemm_nn(n_, n_, width, cas_.data(), block.data(), base);
  }
}

}  // namespace pdftemra::spectral
