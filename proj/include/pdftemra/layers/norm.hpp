// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pdftemra/num/tape.hpp"
#include "pdftemra/num/tensor.hpp"

namespace pdftemra::layers {

/// Normalized rows z = (x - mean) / sqrt(var + eps) over the last axis, with
/// population variance. Not recorded on the tape.
std::vector<double> normalize_rows(const num::Tensor& x, double eps);

/// AdaNorm: K * (1 - k * z) * z per row, where the factor (1 - k * z) is a
/// constant for backward. No learnable parameters.
class AdaNorm {
 public:
  static constexpr double kCoeff = 0.01;
  static constexpr double kEps = 1e-5;

  explicit AdaNorm(double scale = 1.0, double eps = kEps);

  double scale() const noexcept { return scale_; }
  num::Tensor operator()(const num::Tensor& x) const;

 private:
  double scale_;
  double eps_;
};

/// Makes every AdaNorm evaluated on this thread either record its
/// (1 - k * z) factors or replay the ones recorded earlier, in call order.
/// With replayed factors the forward pass is exactly the function whose
/// gradient the tape computes, which is what a finite-difference check needs.
class AdaNormFactorScope {
 public:
  enum class Mode { kRecord, kReplay };

  AdaNormFactorScope(std::vector<std::vector<double>>& store, Mode mode);
  ~AdaNormFactorScope();
  AdaNormFactorScope(const AdaNormFactorScope&) = delete;
  AdaNormFactorScope& operator=(const AdaNormFactorScope&) = delete;

  /// Factor for a call with `z`, honouring the innermost active scope.
  static std::vector<double> factor(const std::vector<double>& z);

 private:
  std::vector<std::vector<double>>* store_;
  Mode mode_;
  std::size_t next_ = 0;
  AdaNormFactorScope* previous_;
};

/// Standard layer normalization with learnable gain (init 1) and bias (init 0).
class LayerNorm {
 public:
  static constexpr double kEps = 1e-5;

  LayerNorm(std::size_t dim, const std::string& prefix);

  num::Tensor operator()(const num::Tensor& x);
  std::vector<num::Parameter*> parameters() { return {&gain_, &bias_}; }

 private:
  num::Parameter gain_;
  num::Parameter bias_;
};

}  // namespace pdftemra::layers
