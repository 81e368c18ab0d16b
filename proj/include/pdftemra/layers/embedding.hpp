// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdftemra/num/rng.hpp"
#include "pdftemra/num/tape.hpp"
#include "pdftemra/num/tensor.hpp"

namespace pdftemra::layers {

/// Token + segment + learned position embeddings, tables drawn N(0, 1).
class Embeddings {
 public:
  static constexpr std::size_t kSegments = 2;

  Embeddings(std::size_t vocab, std::size_t max_len, std::size_t dim, num::Rng& rng, const std::string& prefix);

  /// tokens and segments are row-major [batch, len]; returns [batch, len, dim].
  /// Throws IndexError for ids outside a table and LengthError when len
  /// exceeds max_len.
  num::Tensor operator()(std::span<const std::int32_t> tokens, std::span<const std::int32_t> segments,
                         std::size_t batch, std::size_t len);

  std::size_t dim() const noexcept { return token_.value.dim(1); }
  std::size_t max_len() const noexcept { return position_.value.dim(0); }
  num::Parameter& token() noexcept { return token_; }
  num::Parameter& segment() noexcept { return segment_; }
  num::Parameter& position() noexcept { return position_; }
  std::vector<num::Parameter*> parameters() { return {&token_, &segment_, &position_}; }

 private:
  num::Parameter token_;
  num::Parameter segment_;
  num::Parameter position_;
};

}  // namespace pdftemra::layers
