// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "pdftemra/data/tokenizer.hpp"
#include "pdftemra/model/model.hpp"

namespace pdftemra::distill {

/// Greedy decoding from BOS prompt SEP until EOS or max_seq_len, one row per
/// prompt, rows padded to max_seq_len. Throws ContractError for an empty
/// prompt and LengthError when BOS prompt SEP leaves no room to generate.
std::vector<std::string> greedy_decode(model::LanguageModel& model, const data::Tokenizer& tokenizer,
                                       const std::vector<std::string>& prompts);

}  // namespace pdftemra::distill
