// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/layers/embedding.hpp"

#include "pdftemra/error.hpp"
#include "pdftemra/num/ops.hpp"

namespace pdftemra::layers {

namespace {

num::Tensor normal_table(std::size_t rows, std::size_t dim, num::Rng& rng) {
  num::Tensor t({rows, dim});
  for (double& v : t.values()) v = rng.normal();
  return t;
}

}  // namespace

Embeddings::Embeddings(std::size_t vocab, std::size_t max_len, std::size_t dim, num::Rng& rng,
                       const std::string& prefix)
    : token_(prefix + ".token", normal_table(vocab, dim, rng)),
      segment_(prefix + ".segment", normal_table(kSegments, dim, rng)),
      position_(prefix + ".position", normal_table(max_len, dim, rng)) {}

num::Tensor Embeddings::operator()(std::span<const std::int32_t> tokens, std::span<const std::int32_t> segments,
                                   std::size_t batch, std::size_t len) {
  if (len > max_len()) {
    throw LengthError("sequence length " + std::to_string(len) + " exceeds the maximum " + std::to_string(max_len()));
  }
  if (tokens.size() != batch * len || segments.size() != batch * len) {
    throw DimensionError("embedding ids do not match batch " + std::to_string(batch) + " x length " +
                         std::to_string(len));
  }
  std::vector<std::int32_t> positions(batch * len);
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<std::int32_t>(i % len);
  const num::Shape prefix{batch, len};
  num::Tensor x = num::gather_rows(num::use(token_), tokens, prefix);
  x = num::add(x, num::gather_rows(num::use(segment_), segments, prefix));
  return num::add(x, num::gather_rows(num::use(position_), positions, prefix));
}

}  // namespace pdftemra::layers
