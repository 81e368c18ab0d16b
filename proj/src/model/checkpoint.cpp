// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/model/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pdftemra/error.hpp"

namespace pdftemra::model {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "pdftemra-checkpoint";

json config_json(const ModelConfig& c) {
  return json{{"vocab_size", c.vocab_size},         {"max_seq_len", c.max_seq_len}, {"embed_dim", c.embed_dim},
              {"n_heads", c.n_heads},               {"latent_dim", c.latent_dim},   {"n_blocks", c.n_blocks},
              {"dropout", c.dropout},               {"ensemble_pool_k", c.ensemble_pool_k},
              {"adanorm_K", c.adanorm_K},           {"seed", c.seed},               {"residual", c.residual},
              {"adapter_rank", c.adapter_rank}};
}

ModelConfig config_from(const json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.max_seq_len = j.at("max_seq_len").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.n_heads = j.at("n_heads").get<std::size_t>();
  c.latent_dim = j.at("latent_dim").get<std::size_t>();
  c.n_blocks = j.at("n_blocks").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.ensemble_pool_k = j.at("ensemble_pool_k").get<std::size_t>();
  c.adanorm_K = j.at("adanorm_K").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.residual = j.at("residual").get<bool>();
  c.adapter_rank = j.at("adapter_rank").get<std::size_t>();
  return c;
}

}  // namespace

std::string checkpoint_json(LanguageModel& model) {
  json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  j["kind"] = std::string(to_string(model.kind()));
  j["config"] = config_json(model.config());
  if (auto* consumer = dynamic_cast<Consumer*>(&model)) {
    json blocks = json::array();
    for (const auto& heads : consumer->membership()) {
      json hs = json::array();
      for (const auto& members : heads) {
        json names = json::array();
        for (auto kind : members) names.push_back(std::string(layers::name(kind)));
        hs.push_back(names);
      }
      blocks.push_back(hs);
    }
    j["ensembles"] = blocks;
  }
  json tensors = json::object();
  for (auto* p : model.parameters()) {
    tensors[p->name] = json{{"shape", p->value.shape()}, {"data", p->value.storage()}};
  }
  j["tensors"] = tensors;
  return j.dump(1);
}

std::unique_ptr<LanguageModel> model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) throw ParseError("not a pdftemra checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    const ModelConfig config = config_from(j.at("config"));
    std::unique_ptr<LanguageModel> model;
    if (kind == ModelKind::kConsumer) {
      Consumer::Membership members;
      for (const auto& blk : j.at("ensembles")) {
        auto& heads = members.emplace_back();
        for (const auto& h : blk) {
          auto& kinds = heads.emplace_back();
          for (const auto& n : h) kinds.push_back(layers::parse_activation(n.get<std::string>()));
        }
      }
      model = std::make_unique<Consumer>(config, members);
    } else {
      model = std::make_unique<Distributor>(config);
    }
    const json& tensors = j.at("tensors");
    auto params = model->parameters();
    if (tensors.size() != params.size()) {
      throw ParseError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, model expects " +
                       std::to_string(params.size()));
    }
    for (auto* p : params) {
      if (!tensors.contains(p->name)) throw ParseError("checkpoint is missing tensor '" + p->name + "'");
      const json& t = tensors.at(p->name);
      auto shape = t.at("shape").get<num::Shape>();
      if (shape != p->value.shape()) {
        throw ParseError("tensor '" + p->name + "' has shape " + num::to_string(shape) + ", model expects " +
                         num::to_string(p->value.shape()));
      }
      p->value = num::Tensor(shape, t.at("data").get<std::vector<double>>());
      p->zero_grad();
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(LanguageModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << checkpoint_json(model) << '\n';
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

std::unique_ptr<LanguageModel> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace pdftemra::model
