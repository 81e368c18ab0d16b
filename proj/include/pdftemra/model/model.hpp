// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdftemra/layers/activation.hpp"
#include "pdftemra/layers/attention.hpp"
#include "pdftemra/layers/embedding.hpp"
#include "pdftemra/layers/linear.hpp"
#include "pdftemra/layers/norm.hpp"
#include "pdftemra/model/config.hpp"
#include "pdftemra/num/rng.hpp"
#include "pdftemra/num/tape.hpp"
#include "pdftemra/num/tensor.hpp"
#include "pdftemra/spectral/hartley_mixer.hpp"

namespace pdftemra::model {

/// Learnable-scalar count per named layer, in forward order.
struct ParamCount {
  std::vector<std::pair<std::string, std::size_t>> layers;
  std::size_t total = 0;

  /// Count of the layer with this exact name; throws IndexError if absent.
  std::size_t of(const std::string& layer) const;
};

/// Row-major [batch, len] token and segment ids.
struct Inputs {
  std::span<const std::int32_t> tokens;
  std::span<const std::int32_t> segments;
  std::size_t batch = 0;
  std::size_t len = 0;
};

/// Next-token model: ids -> un-normalized logits [batch, len, vocab].
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual ModelKind kind() const noexcept = 0;
  const ModelConfig& config() const noexcept { return config_; }

  /// Dropout is active only when `training` is set.
  num::Tensor forward(const Inputs& in, bool training);

  std::vector<num::Parameter*> parameters();
  /// Parameters grouped by layer; groups may be empty (parameter-free layers).
  virtual std::vector<std::pair<std::string, std::vector<num::Parameter*>>> layer_groups() = 0;
  ParamCount count_params();

  /// Stream driving dropout masks.
  num::Rng& dropout_rng() noexcept { return dropout_rng_; }

 protected:
  explicit LanguageModel(const ModelConfig& config);

  virtual num::Tensor block(std::size_t index, const num::Tensor& x, bool training) = 0;

  ModelConfig config_;
  num::Rng init_rng_;
  num::Rng dropout_rng_;
  layers::Embeddings embeddings_;
  layers::Linear output_;
};

/// Hartley-mixing student. Each block: per-head activation ensembles over a
/// shared Hartley transform, summed, dropout, AdaNorm (+ residual),
/// feed-forward (+ optional adapter), AdaNorm (+ residual).
class Consumer final : public LanguageModel {
 public:
  using Membership = std::vector<std::vector<std::vector<layers::ActivationKind>>>;

  /// Ensemble members are sampled from the config seed unless given
  /// explicitly as [block][head] -> kinds.
  explicit Consumer(const ModelConfig& config, std::optional<Membership> members = std::nullopt);

  ModelKind kind() const noexcept override { return ModelKind::kConsumer; }
  Membership membership() const;
  std::vector<std::pair<std::string, std::vector<num::Parameter*>>> layer_groups() override;

 private:
  struct Block {
    std::vector<layers::ActivationEnsemble> heads;
    layers::AdaNorm norm1;
    layers::FeedForward ff;
    std::optional<layers::Adapter> adapter;
    layers::AdaNorm norm2;
  };

  num::Tensor block(std::size_t index, const num::Tensor& x, bool training) override;

  spectral::HartleyMixer mixer_;
  std::vector<std::unique_ptr<Block>> blocks_;
};

/// Attention teacher with standard layer normalization.
class Distributor final : public LanguageModel {
 public:
  explicit Distributor(const ModelConfig& config);

  ModelKind kind() const noexcept override { return ModelKind::kDistributor; }
  std::vector<std::pair<std::string, std::vector<num::Parameter*>>> layer_groups() override;

 private:
  struct Block {
    layers::Attention attention;
    layers::LayerNorm norm1;
    layers::FeedForward ff;
    std::optional<layers::Adapter> adapter;
    layers::LayerNorm norm2;
  };

  num::Tensor block(std::size_t index, const num::Tensor& x, bool training) override;

  std::vector<std::unique_ptr<Block>> blocks_;
};

std::unique_ptr<LanguageModel> make_model(ModelKind kind, const ModelConfig& config);

}  // namespace pdftemra::model
