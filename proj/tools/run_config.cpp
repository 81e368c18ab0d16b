// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include "pdftemra/error.hpp"

namespace pdftemra::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key) + " (expected true or false)");
}

std::string target_name(data::TargetMode m) { return m == data::TargetMode::kAll ? "all" : "answer"; }

data::TargetMode parse_targets(std::string_view text) {
  if (text == "all") return data::TargetMode::kAll;
  if (text == "answer") return data::TargetMode::kAnswer;
  throw ConfigError("invalid value '" + std::string(text) + "' for targets (expected all or answer)");
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key text_key(std::string name, std::string RunConfig::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.*field = std::string(v); },
          [field](const RunConfig& c) { return c.*field; }};
}

template <typename T, typename Owner>
Key number_key(std::string name, Owner RunConfig::*owner, T Owner::*field) {
  return {name,
          [name, owner, field](RunConfig& c, std::string_view v) { c.*owner.*field = parse_number<T>(name, v); },
          [owner, field](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*owner.*field);
            } else {
              return std::to_string(c.*owner.*field);
            }
          }};
}

template <typename Owner>
Key bool_key(std::string name, Owner RunConfig::*owner, bool Owner::*field) {
  return {name, [name, owner, field](RunConfig& c, std::string_view v) { c.*owner.*field = parse_bool(name, v); },
          [owner, field](const RunConfig& c) { return std::string(c.*owner.*field ? "true" : "false"); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(text_key("regime", &RunConfig::regime));
    k.push_back(text_key("train", &RunConfig::train_path));
    k.push_back(text_key("validation", &RunConfig::validation_path));
    k.push_back(text_key("tokenizer", &RunConfig::tokenizer_path));
    k.push_back(text_key("teacher", &RunConfig::teacher_path));
    k.push_back({"vocab_size",
                 [](RunConfig& c, std::string_view v) {
                   c.auto_vocab_size = v == "auto";
                   if (!c.auto_vocab_size) c.model.vocab_size = parse_number<std::size_t>("vocab_size", v);
                 },
                 [](const RunConfig& c) {
                   return c.auto_vocab_size ? std::string("auto") : std::to_string(c.model.vocab_size);
                 }});
    k.push_back({"max_seq_len",
                 [](RunConfig& c, std::string_view v) {
                   c.auto_max_seq_len = v == "auto";
                   if (!c.auto_max_seq_len) c.model.max_seq_len = parse_number<std::size_t>("max_seq_len", v);
                 },
                 [](const RunConfig& c) {
                   return c.auto_max_seq_len ? std::string("auto") : std::to_string(c.model.max_seq_len);
                 }});
    k.push_back(number_key("embed_dim", &RunConfig::model, &model::ModelConfig::embed_dim));
    k.push_back(number_key("n_heads", &RunConfig::model, &model::ModelConfig::n_heads));
    k.push_back(number_key("latent_dim", &RunConfig::model, &model::ModelConfig::latent_dim));
    k.push_back(number_key("n_blocks", &RunConfig::model, &model::ModelConfig::n_blocks));
    k.push_back(number_key("dropout", &RunConfig::model, &model::ModelConfig::dropout));
    k.push_back(number_key("ensemble_pool_k", &RunConfig::model, &model::ModelConfig::ensemble_pool_k));
    k.push_back(number_key("adanorm_K", &RunConfig::model, &model::ModelConfig::adanorm_K));
    k.push_back(bool_key("residual", &RunConfig::model, &model::ModelConfig::residual));
    k.push_back(number_key("adapter_rank", &RunConfig::model, &model::ModelConfig::adapter_rank));
    k.push_back(number_key("epochs", &RunConfig::train, &distill::DistillConfig::epochs));
    k.push_back(number_key("lr", &RunConfig::train, &distill::DistillConfig::lr));
    k.push_back(number_key("temperature", &RunConfig::train, &distill::DistillConfig::temperature));
    k.push_back(number_key("alpha", &RunConfig::train, &distill::DistillConfig::alpha));
    k.push_back(number_key("batch_size", &RunConfig::train, &distill::DistillConfig::batch_size));
    k.push_back({"seed",
                 [](RunConfig& c, std::string_view v) {
                   c.train.seed = parse_number<std::uint64_t>("seed", v);
                   c.model.seed = c.train.seed;
                 },
                 [](const RunConfig& c) { return std::to_string(c.train.seed); }});
    k.push_back({"optimizer",
                 [](RunConfig& c, std::string_view v) { c.train.optimizer = num::parse_optimizer(std::string(v)); },
                 [](const RunConfig& c) { return num::to_string(c.train.optimizer); }});
    k.push_back({"targets", [](RunConfig& c, std::string_view v) { c.train.targets = parse_targets(v); },
                 [](const RunConfig& c) { return target_name(c.train.targets); }});
    k.push_back(bool_key("consumer_prefix_rows", &RunConfig::train, &distill::DistillConfig::consumer_prefix_rows));
    return k;
  }();
  return table;
}

const Key& find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (k.name == name) return k;
  }
  throw ConfigError("unknown config key '" + std::string(name) + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& k : keys()) n.push_back(k.name);
    return n;
  }();
  return names;
}

void set_key(RunConfig& config, std::string_view key, std::string_view value) { find_key(key).set(config, value); }

std::string get_key(const RunConfig& config, std::string_view key) { return find_key(key).get(config); }

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    try {
      set_key(config, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) out += k.name + "=" + k.get(config) + "\n";
  return out;
}

}  // namespace pdftemra::cli
