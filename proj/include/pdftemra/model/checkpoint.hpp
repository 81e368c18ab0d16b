// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "pdftemra/model/model.hpp"

namespace pdftemra::model {

inline constexpr int kCheckpointVersion = 1;

/// Self-describing JSON checkpoint: format tag, version, model kind, the full
/// ModelConfig, the Consumer's ensemble membership, and every parameter as
/// {"shape": [...], "data": [...]} keyed by its layer path. Doubles are
/// written in shortest round-trip form, so save -> load is exact.
std::string checkpoint_json(LanguageModel& model);
std::unique_ptr<LanguageModel> model_from_json(const std::string& text);

/// Throws IoError when the file cannot be written or read and ParseError when
/// its content is not a valid checkpoint.
void save_checkpoint(LanguageModel& model, const std::string& path);
std::unique_ptr<LanguageModel> load_checkpoint(const std::string& path);

}  // namespace pdftemra::model
