// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pdftemra::spectral {

using Complex = std::complex<double>;

/// Forward DFT, X_t = sum_n x_n exp(-2 pi i t n / N), unnormalized.
///
/// Power-of-two lengths use an iterative radix-2 FFT; other lengths below 32
/// use the direct O(N^2) sum and the rest go through Bluestein's chirp-z
/// algorithm. Throws ContractError on empty input.
std::vector<Complex> dft(std::span<const double> x);
std::vector<Complex> dft(std::span<const Complex> x);

/// Direct O(N^2) evaluation of the same sum.
std::vector<Complex> dft_naive(std::span<const Complex> x);

/// Discrete Hartley transform H_k = sum_n x_n cas(2 pi k n / N), computed as
/// Re(DFT) - Im(DFT). Unnormalized: applying it twice multiplies by N.
std::vector<double> dht(std::span<const double> x);

/// Reusable length-n Hartley transform for many lines of the same length.
///
/// Short lengths are applied as a dense product with the (symmetric) cas
/// matrix; long ones fall back to `dht`.
class DhtKernel {
 public:
  explicit DhtKernel(std::size_t n);

  std::size_t length() const noexcept { return n_; }
  /// In-place transform of every row of a row-major [rows, n] block.
  void apply_trailing(double* data, std::size_t rows) const;
  /// In-place transform along the middle axis of a row-major
  /// [batches, n, width] block.
  void apply_middle(double* data, std::size_t batches, std::size_t width) const;

  static constexpr std::size_t kDenseLimit = 64;

 private:
  std::size_t n_;
  std::vector<double> cas_;  // n*n when dense, empty otherwise
};

}  // namespace pdftemra::spectral
