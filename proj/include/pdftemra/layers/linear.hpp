// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pdftemra/layers/activation.hpp"
#include "pdftemra/num/rng.hpp"
#include "pdftemra/num/tape.hpp"
#include "pdftemra/num/tensor.hpp"

namespace pdftemra::layers {

/// y = x . W (+ b) with W stored [in, out]. Weights and bias start
/// uniform in +-1/sqrt(in).
class Linear {
 public:
  Linear(std::size_t in, std::size_t out, bool bias, num::Rng& rng, const std::string& prefix);

  num::Tensor operator()(const num::Tensor& x);
  std::size_t in_dim() const noexcept { return weight_.value.dim(0); }
  std::size_t out_dim() const noexcept { return weight_.value.dim(1); }
  num::Parameter& weight() noexcept { return weight_; }
  num::Parameter& bias() noexcept { return bias_; }
  std::vector<num::Parameter*> parameters();

 private:
  num::Parameter weight_;
  num::Parameter bias_;  // empty when the layer has no bias
};

/// embed -> latent -> embed with GELU in between, both projections biased.
class FeedForward {
 public:
  FeedForward(std::size_t dim, std::size_t hidden, num::Rng& rng, const std::string& prefix);

  num::Tensor operator()(const num::Tensor& x);
  std::vector<num::Parameter*> parameters();

 private:
  Linear in_;
  Linear out_;
};

/// Residual bottleneck x + up(act(down(x))), no biases. `up` starts at zero,
/// so a fresh adapter is the identity.
class Adapter {
 public:
  Adapter(std::size_t dim, std::size_t rank, ActivationKind act, num::Rng& rng, const std::string& prefix);

  num::Tensor operator()(const num::Tensor& x);
  num::Parameter& down() noexcept { return down_; }
  num::Parameter& up() noexcept { return up_; }
  std::vector<num::Parameter*> parameters();

 private:
  ActivationKind act_;
  num::Parameter down_;
  num::Parameter up_;
  num::Parameter prelu_alpha_;
};

/// Fully connected layer whose weight and bias are produced from a
/// conditioning vector theta by two small generator networks
/// (theta -> tanh hidden -> flat output). The generators' output layers start
/// at zero, so a fresh layer maps everything to f(0) = 0.
class ModulatedLinear {
 public:
  ModulatedLinear(std::size_t in, std::size_t out, std::size_t theta_dim, std::size_t hidden, ActivationKind act,
                  num::Rng& rng, const std::string& prefix);

  /// f(x . W(theta) + b(theta)); W(theta) is laid out [in, out].
  num::Tensor operator()(const num::Tensor& x, const num::Tensor& theta);
  std::size_t theta_dim() const noexcept { return weight_hidden_.in_dim(); }
  Linear& weight_output() noexcept { return weight_output_; }
  Linear& bias_output() noexcept { return bias_output_; }
  std::vector<num::Parameter*> parameters();

 private:
  std::size_t in_;
  std::size_t out_;
  ActivationKind act_;
  Linear weight_hidden_;
  Linear weight_output_;
  Linear bias_hidden_;
  Linear bias_output_;
  num::Parameter prelu_alpha_;
};

/// Inverted dropout: zeroes entries with probability `rate` and rescales the
/// rest by 1/(1 - rate). Identity when not training or rate is 0.
num::Tensor dropout(const num::Tensor& x, double rate, num::Rng& rng, bool training);

}  // namespace pdftemra::layers
