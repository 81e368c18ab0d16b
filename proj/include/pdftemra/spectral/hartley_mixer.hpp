// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>

#include "pdftemra/num/tensor.hpp"
#include "pdftemra/spectral/transform.hpp"

namespace pdftemra::spectral {

/// Parameter-free token mixing: a Hartley transform along the hidden axis
/// followed by one along the sequence axis, for every batch element.
///
/// The 2-D transform is a symmetric linear map, so its backward pass is the
/// same transform applied to the upstream gradient.
class HartleyMixer {
 public:
  HartleyMixer(std::size_t seq_len, std::size_t embed_dim);

  /// x[B, seq_len, embed_dim] -> same shape.
  num::Tensor operator()(const num::Tensor& x) const;

  std::size_t seq_len() const noexcept { return kernels_->seq.length(); }
  std::size_t embed_dim() const noexcept { return kernels_->hidden.length(); }
  static constexpr std::size_t parameter_count() noexcept { return 0; }

  /// Raw in-place transform of a [batches, seq_len, embed_dim] block.
  void transform(double* data, std::size_t batches) const;

 private:
  struct Kernels {
    DhtKernel seq;
    DhtKernel hidden;
    void transform(double* data, std::size_t batches) const;
  };
  // Shared so recorded backward steps stay valid if the mixer is moved.
  std::shared_ptr<const Kernels> kernels_;
};

/// One-shot convenience wrapper sized from the input.
num::Tensor hartley_mix(const num::Tensor& x);

}  // namespace pdftemra::spectral
