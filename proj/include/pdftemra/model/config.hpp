// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace pdftemra::model {

enum class ModelKind { kConsumer, kDistributor };

std::string_view to_string(ModelKind kind) noexcept;
/// "consumer" or "distributor".
ModelKind parse_model_kind(std::string_view text);

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t max_seq_len = 512;
  std::size_t embed_dim = 256;
  std::size_t n_heads = 10;
  std::size_t latent_dim = 100;
  std::size_t n_blocks = 1;
  double dropout = 0.1;
  std::size_t ensemble_pool_k = 3;
  double adanorm_K = 1.0;
  std::uint64_t seed = 0;
  /// Residual connections around both normalization sub-blocks.
  bool residual = true;
  /// Low-rank adapter after each feed-forward; 0 disables adapters.
  std::size_t adapter_rank = 0;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

}  // namespace pdftemra::model
