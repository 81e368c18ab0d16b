// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/layers/attention.hpp"

#include <cmath>

#include "pdftemra/error.hpp"
#include "pdftemra/num/ops.hpp"

namespace pdftemra::layers {

Attention::Attention(std::size_t d_model, std::size_t d_k, bool causal, num::Rng& rng, const std::string& prefix)
    : d_k_(d_k),
      causal_(causal),
      wq_(d_model, d_k, false, rng, prefix + ".query"),
      wk_(d_model, d_k, false, rng, prefix + ".key"),
      wv_(d_model, d_k, false, rng, prefix + ".value"),
      wo_(d_k, d_model, false, rng, prefix + ".output") {}

num::Tensor Attention::scores_softmax(const num::Tensor& q, const num::Tensor& k) const {
  const std::size_t n = q.dim(1);
  num::Tensor scores = num::scale(num::bmm(q, num::transpose_last2(k)), 1.0 / std::sqrt(static_cast<double>(d_k_)));
  if (!causal_) return num::softmax(scores, 2);
  std::vector<std::uint8_t> mask(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) mask[i * n + j] = 1;
  }
  return num::masked_softmax(scores, mask);
}

num::Tensor Attention::operator()(const num::Tensor& x) {
  if (x.rank() != 3 || x.dim(2) != wq_.in_dim()) {
    throw DimensionError("attention expects [B, N, " + std::to_string(wq_.in_dim()) + "], got " +
                         num::to_string(x.shape()));
  }
  num::Tensor p = scores_softmax(wq_(x), wk_(x));
  return wo_(num::bmm(p, wv_(x)));
}

num::Tensor Attention::weights(const num::Tensor& x) {
  num::Tape::Paused off;
  return scores_softmax(wq_(x), wk_(x));
}

std::vector<num::Parameter*> Attention::parameters() {
  return {&wq_.weight(), &wk_.weight(), &wv_.weight(), &wo_.weight()};
}

}  // namespace pdftemra::layers
