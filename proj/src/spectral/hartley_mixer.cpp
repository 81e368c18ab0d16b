// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/spectral/hartley_mixer.hpp"

#include <memory>
#include <vector>

#include "pdftemra/error.hpp"
#include "pdftemra/num/tape.hpp"

namespace pdftemra::spectral {

HartleyMixer::HartleyMixer(std::size_t seq_len, std::size_t embed_dim)
    : kernels_(std::make_shared<const Kernels>(Kernels{DhtKernel(seq_len), DhtKernel(embed_dim)})) {}

void HartleyMixer::Kernels::transform(double* data, std::size_t batches) const {
  hidden.apply_trailing(data, batches * seq.length());
  seq.apply_middle(data, batches, hidden.length());
}

void HartleyMixer::transform(double* data, std::size_t batches) const { kernels_->transform(data, batches); }

num::Tensor HartleyMixer::operator()(const num::Tensor& x) const {
  if (x.rank() != 3 || x.dim(1) != seq_len() || x.dim(2) != embed_dim()) {
    throw DimensionError("hartley mixer expects [B," + std::to_string(seq_len()) + "," +
                         std::to_string(embed_dim()) + "], got " + num::to_string(x.shape()));
  }
  const std::size_t batches = x.dim(0);
  num::Tensor out(x.shape(), x.storage());
  transform(out.values().data(), batches);
  num::Tape* tape = num::Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  return tape->push(std::move(out), [k = kernels_, rx, batches](std::span<const double> g, num::Tape& t) {
    std::vector<double> back(g.begin(), g.end());
    k->transform(back.data(), batches);
    t.accumulate(rx, back);
  });
}

num::Tensor hartley_mix(const num::Tensor& x) {
  if (x.rank() != 3) throw DimensionError("hartley_mix expects [B,N,d], got " + num::to_string(x.shape()));
  return HartleyMixer(x.dim(1), x.dim(2))(x);
}

}  // namespace pdftemra::spectral
