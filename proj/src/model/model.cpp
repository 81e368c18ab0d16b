// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/model/model.hpp"

#include <array>

#include "pdftemra/error.hpp"
#include "pdftemra/num/ops.hpp"

namespace pdftemra::model {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kDropoutStream = 2;
constexpr std::uint64_t kEnsembleStream = 3;

const ModelConfig& checked(const ModelConfig& config) {
  config.validate();
  return config;
}

std::string block_name(std::size_t i) { return "blocks." + std::to_string(i); }

}  // namespace

std::size_t ParamCount::of(const std::string& layer) const {
  for (const auto& [name, n] : layers) {
    if (name == layer) return n;
  }
  throw IndexError("no layer named '" + layer + "'");
}

LanguageModel::LanguageModel(const ModelConfig& config)
    : config_(checked(config)),
      init_rng_(num::Rng(config.seed).fork(kInitStream)),
      dropout_rng_(num::Rng(config.seed).fork(kDropoutStream)),
      embeddings_(config.vocab_size, config.max_seq_len, config.embed_dim, init_rng_, "embeddings"),
      output_(config.embed_dim, config.vocab_size, false, init_rng_, "output") {}

num::Tensor LanguageModel::forward(const Inputs& in, bool training) {
  num::Tensor x = embeddings_(in.tokens, in.segments, in.batch, in.len);
  for (std::size_t i = 0; i < config_.n_blocks; ++i) x = block(i, x, training);
  return output_(x);
}

std::vector<num::Parameter*> LanguageModel::parameters() {
  std::vector<num::Parameter*> out;
  for (auto& [name, group] : layer_groups()) out.insert(out.end(), group.begin(), group.end());
  return out;
}

ParamCount LanguageModel::count_params() {
  ParamCount c;
  for (auto& [name, group] : layer_groups()) {
    std::size_t n = 0;
    for (auto* p : group) n += p->size();
    c.layers.emplace_back(name, n);
    c.total += n;
  }
  return c;
}

Consumer::Consumer(const ModelConfig& config, std::optional<Membership> members)
    : LanguageModel(config), mixer_(config.max_seq_len, config.embed_dim) {
  if (!members) {
    num::Rng rng = num::Rng(config.seed).fork(kEnsembleStream);
    members.emplace();
    for (std::size_t b = 0; b < config.n_blocks; ++b) {
      members->push_back(layers::sample_ensembles(rng, config.n_heads, config.ensemble_pool_k));
    }
  }
  if (members->size() != config.n_blocks) throw ConfigError("ensemble membership does not match n_blocks");
  for (std::size_t b = 0; b < config.n_blocks; ++b) {
    const std::string prefix = block_name(b);
    if ((*members)[b].size() != config.n_heads) throw ConfigError("ensemble membership does not match n_heads");
    auto blk = std::make_unique<Block>(Block{
        {},
        layers::AdaNorm(config.adanorm_K),
        layers::FeedForward(config.embed_dim, config.latent_dim, init_rng_, prefix + ".ff"),
        std::nullopt,
        layers::AdaNorm(config.adanorm_K),
    });
    blk->heads.reserve(config.n_heads);
    for (std::size_t h = 0; h < config.n_heads; ++h) {
      blk->heads.emplace_back((*members)[b][h], prefix + ".heads." + std::to_string(h));
    }
    if (config.adapter_rank > 0) {
      blk->adapter.emplace(config.embed_dim, config.adapter_rank, layers::ActivationKind::kGelu, init_rng_,
                           prefix + ".adapter");
    }
    blocks_.push_back(std::move(blk));
  }
}

Consumer::Membership Consumer::membership() const {
  Membership m;
  for (const auto& blk : blocks_) {
    auto& heads = m.emplace_back();
    for (const auto& e : blk->heads) heads.push_back(e.members());
  }
  return m;
}

num::Tensor Consumer::block(std::size_t index, const num::Tensor& x, bool training) {
  Block& b = *blocks_[index];
  if (x.dim(1) != mixer_.seq_len()) {
    // The transform length is the sequence length actually fed in.
    mixer_ = spectral::HartleyMixer(x.dim(1), config_.embed_dim);
  }
  num::Tensor m = mixer_(x);
  // Heads are summed right away, so the sum of per-head convex combinations
  // is a single combination over the distinct member outputs. A member's
  // weight is the sum of its head weights; PReLU members keep their own
  // slope and term.
  std::vector<num::Tensor> terms;
  std::array<std::size_t, 10> slot;
  slot.fill(terms.max_size());
  std::vector<std::vector<std::size_t>> term_of(b.heads.size());
  for (std::size_t h = 0; h < b.heads.size(); ++h) {
    auto& head = b.heads[h];
    for (auto kind : head.members()) {
      if (kind == layers::ActivationKind::kPrelu) {
        terms.push_back(layers::activate(kind, m, num::use(head.prelu_alpha())));
        term_of[h].push_back(terms.size() - 1);
        continue;
      }
      auto& k = slot[layers::pool_index(kind)];
      if (k == terms.max_size()) {
        terms.push_back(layers::activate(kind, m));
        k = terms.size() - 1;
      }
      term_of[h].push_back(k);
    }
  }
  std::vector<num::Tensor> parts;
  parts.reserve(b.heads.size());
  for (std::size_t h = 0; h < b.heads.size(); ++h) {
    const std::size_t k = term_of[h].size();
    num::Tensor scatter({terms.size(), k});
    for (std::size_t j = 0; j < k; ++j) scatter.values()[term_of[h][j] * k + j] = 1.0;
    num::Tensor w = num::reshape(num::softmax(num::use(b.heads[h].mix_logits()), 0), {k, 1});
    parts.push_back(num::matmul(scatter, w));
  }
  num::Tensor weights = num::reshape(parts.size() == 1 ? parts[0] : num::add_n(parts), {terms.size()});
  num::Tensor s = num::combine(terms, weights);
  s = layers::dropout(s, config_.dropout, dropout_rng_, training);
  num::Tensor y = b.norm1(config_.residual ? num::add(x, s) : s);
  num::Tensor h = b.ff(y);
  if (b.adapter) h = (*b.adapter)(h);
  return b.norm2(config_.residual ? num::add(y, h) : h);
}

std::vector<std::pair<std::string, std::vector<num::Parameter*>>> Consumer::layer_groups() {
  std::vector<std::pair<std::string, std::vector<num::Parameter*>>> g;
  g.emplace_back("embeddings", embeddings_.parameters());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    Block& b = *blocks_[i];
    const std::string prefix = block_name(i);
    g.emplace_back(prefix + ".hartley", std::vector<num::Parameter*>{});
    std::vector<num::Parameter*> ens;
    for (auto& e : b.heads) {
      for (auto* p : e.parameters()) ens.push_back(p);
    }
    g.emplace_back(prefix + ".ensembles", ens);
    g.emplace_back(prefix + ".norm1", std::vector<num::Parameter*>{});
    g.emplace_back(prefix + ".ff", b.ff.parameters());
    if (b.adapter) g.emplace_back(prefix + ".adapter", b.adapter->parameters());
    g.emplace_back(prefix + ".norm2", std::vector<num::Parameter*>{});
  }
  g.emplace_back("output", output_.parameters());
  return g;
}

Distributor::Distributor(const ModelConfig& config) : LanguageModel(config) {
  for (std::size_t b = 0; b < config.n_blocks; ++b) {
    const std::string prefix = block_name(b);
    auto blk = std::make_unique<Block>(Block{
        layers::Attention(config.embed_dim, config.embed_dim, true, init_rng_, prefix + ".attention"),
        layers::LayerNorm(config.embed_dim, prefix + ".norm1"),
        layers::FeedForward(config.embed_dim, config.latent_dim, init_rng_, prefix + ".ff"),
        std::nullopt,
        layers::LayerNorm(config.embed_dim, prefix + ".norm2"),
    });
    if (config.adapter_rank > 0) {
      blk->adapter.emplace(config.embed_dim, config.adapter_rank, layers::ActivationKind::kGelu, init_rng_,
                           prefix + ".adapter");
    }
    blocks_.push_back(std::move(blk));
  }
}

num::Tensor Distributor::block(std::size_t index, const num::Tensor& x, bool training) {
  Block& b = *blocks_[index];
  num::Tensor a = layers::dropout(b.attention(x), config_.dropout, dropout_rng_, training);
  num::Tensor y = b.norm1(config_.residual ? num::add(x, a) : a);
  num::Tensor h = b.ff(y);
  if (b.adapter) h = (*b.adapter)(h);
  return b.norm2(config_.residual ? num::add(y, h) : h);
}

std::vector<std::pair<std::string, std::vector<num::Parameter*>>> Distributor::layer_groups() {
  std::vector<std::pair<std::string, std::vector<num::Parameter*>>> g;
  g.emplace_back("embeddings", embeddings_.parameters());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    Block& b = *blocks_[i];
    const std::string prefix = block_name(i);
    g.emplace_back(prefix + ".attention", b.attention.parameters());
    g.emplace_back(prefix + ".norm1", b.norm1.parameters());
    g.emplace_back(prefix + ".ff", b.ff.parameters());
    if (b.adapter) g.emplace_back(prefix + ".adapter", b.adapter->parameters());
    g.emplace_back(prefix + ".norm2", b.norm2.parameters());
  }
  g.emplace_back("output", output_.parameters());
  return g;
}

std::unique_ptr<LanguageModel> make_model(ModelKind kind, const ModelConfig& config) {
  if (kind == ModelKind::kConsumer) return std::make_unique<Consumer>(config);
  return std::make_unique<Distributor>(config);
}

}  // namespace pdftemra::model
