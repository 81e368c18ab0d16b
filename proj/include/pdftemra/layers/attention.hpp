// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pdftemra/layers/linear.hpp"
#include "pdftemra/num/rng.hpp"
#include "pdftemra/num/tensor.hpp"

namespace pdftemra::layers {

/// Single-head scaled dot-product attention softmax(Q K^T / sqrt(d_k)) V
/// followed by an output projection. No biases.
class Attention {
 public:
  Attention(std::size_t d_model, std::size_t d_k, bool causal, num::Rng& rng, const std::string& prefix);

  /// x[B, N, d_model] -> [B, N, d_model].
  num::Tensor operator()(const num::Tensor& x);
  /// Attention weights [B, N, N] for x, computed without recording.
  num::Tensor weights(const num::Tensor& x);

  bool causal() const noexcept { return causal_; }
  Linear& query() noexcept { return wq_; }
  Linear& key() noexcept { return wk_; }
  Linear& value() noexcept { return wv_; }
  Linear& output() noexcept { return wo_; }
  std::vector<num::Parameter*> parameters();

 private:
  num::Tensor scores_softmax(const num::Tensor& q, const num::Tensor& k) const;

  std::size_t d_k_;
  bool causal_;
  Linear wq_;
  Linear wk_;
  Linear wv_;
  Linear wo_;
};

}  // namespace pdftemra::layers
