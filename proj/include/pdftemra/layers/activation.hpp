// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdftemra/num/rng.hpp"
#include "pdftemra/num/tape.hpp"
#include "pdftemra/num/tensor.hpp"

namespace pdftemra::layers {

enum class ActivationKind { kElu, kLeakyRelu, kPrelu, kRelu, kSelu, kCelu, kMish, kTanh, kSilu, kGelu };

inline constexpr std::array<ActivationKind, 10> kActivationPool = {
    ActivationKind::kElu,  ActivationKind::kLeakyRelu, ActivationKind::kPrelu, ActivationKind::kRelu,
    ActivationKind::kSelu, ActivationKind::kCelu,      ActivationKind::kMish,  ActivationKind::kTanh,
    ActivationKind::kSilu, ActivationKind::kGelu};

inline constexpr double kLeakySlope = 0.01;
inline constexpr double kEluAlpha = 1.0;
inline constexpr double kCeluAlpha = 1.0;
inline constexpr double kSeluLambda = 1.05070098;
inline constexpr double kSeluAlpha = 1.67326324;
inline constexpr double kPreluInit = 0.25;

std::string_view name(ActivationKind kind) noexcept;
/// Accepts the names returned by name(), case-insensitively.
ActivationKind parse_activation(std::string_view text);

/// Scalar value and derivative. `alpha` is only read for PReLU.
std::pair<double, double> activation_eval(ActivationKind kind, double x, double alpha = kPreluInit);

/// Pointwise activation. PReLU needs its learnable slope `alpha` (one
/// element); the other kinds ignore it.
num::Tensor activate(ActivationKind kind, const num::Tensor& x, const num::Tensor& alpha = {});

/// Learnable convex mixture of a fixed member set:
/// y = sum_j softmax(mix_logits)_j * act_j(x).
class ActivationEnsemble {
 public:
  ActivationEnsemble(std::vector<ActivationKind> members, const std::string& prefix);

  const std::vector<ActivationKind>& members() const noexcept { return members_; }
  bool has_prelu() const noexcept { return prelu_alpha_.size() == 1; }

  num::Tensor operator()(const num::Tensor& x);
  /// Same mixture with the parameter-free member outputs supplied by the
  /// caller, who may share them between ensembles fed the same input.
  /// `shared[i]` is the output of kActivationPool[i] (only members are read).
  num::Tensor mix(const num::Tensor& x, const std::array<num::Tensor, 10>& shared);
  /// Current mixing weights (softmax of the logits).
  std::vector<double> weights() const;

  num::Parameter& mix_logits() noexcept { return mix_logits_; }
  num::Parameter& prelu_alpha() noexcept { return prelu_alpha_; }
  std::vector<num::Parameter*> parameters();

 private:
  std::vector<ActivationKind> members_;
  num::Parameter mix_logits_;
  num::Parameter prelu_alpha_;
};

/// n_heads member lists of pool_k distinct kinds each, drawn without
/// replacement. Throws ConfigError unless 1 <= pool_k <= 10.
std::vector<std::vector<ActivationKind>> sample_ensembles(num::Rng& rng, std::size_t n_heads, std::size_t pool_k);

/// Index of `kind` in kActivationPool.
std::size_t pool_index(ActivationKind kind) noexcept;

}  // namespace pdftemra::layers
