// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pdftemra/distill/trainer.hpp"
#include "pdftemra/model/config.hpp"

namespace pdftemra::cli {

/// Everything a training run needs, serialized as flat key=value lines.
struct RunConfig {
  std::string regime = "d-alone";
  std::string train_path;
  std::string validation_path;
  std::string tokenizer_path;
  std::string teacher_path;
  model::ModelConfig model;
  distill::DistillConfig train;
  /// max_seq_len = auto: the teacher's for c-distilled, otherwise the longest
  /// encoded example.
  bool auto_max_seq_len = true;
  /// vocab_size = auto: taken from the tokenizer.
  bool auto_vocab_size = true;
};

/// Keys in file order.
const std::vector<std::string>& config_keys();

/// Throws ConfigError for an unknown key or a malformed value.
void set_key(RunConfig& config, std::string_view key, std::string_view value);
std::string get_key(const RunConfig& config, std::string_view key);

/// Lines of key=value; blank lines and lines starting with '#' are skipped.
/// Throws ConfigError naming the line on any error.
void apply_config_text(RunConfig& config, std::string_view text);
std::string format_config(const RunConfig& config);

/// Shortest round-trip form of a double.
std::string format_double(double v);

}  // namespace pdftemra::cli
