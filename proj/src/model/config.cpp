// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/model/config.hpp"

#include "pdftemra/error.hpp"

namespace pdftemra::model {

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::kConsumer ? "consumer" : "distributor";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "consumer") return ModelKind::kConsumer;
  if (text == "distributor") return ModelKind::kDistributor;
  throw ConfigError("unknown model kind '" + std::string(text) + "' (expected consumer or distributor)");
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* field) {
    if (v == 0) throw ConfigError(std::string(field) + " must be positive");
  };
  positive(vocab_size, "vocab_size");
  positive(max_seq_len, "max_seq_len");
  positive(embed_dim, "embed_dim");
  positive(n_heads, "n_heads");
  positive(latent_dim, "latent_dim");
  positive(n_blocks, "n_blocks");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (ensemble_pool_k < 1 || ensemble_pool_k > 10) throw ConfigError("ensemble_pool_k must be in [1, 10]");
  if (!(adanorm_K > 0.0)) throw ConfigError("adanorm_K must be positive");
  if (adapter_rank >= embed_dim) throw ConfigError("adapter_rank must be below embed_dim");
}

}  // namespace pdftemra::model
