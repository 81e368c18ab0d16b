// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pdftemra::metrics {

/// Splits UTF-8 text on Unicode whitespace. No case folding, no punctuation
/// stripping.
std::vector<std::string> split_words(std::string_view text);

struct WerBreakdown {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t ref_len = 0;
  double wer = 0.0;  // (S + I + D) / ref_len, may exceed 1
};

/// Word-level Levenshtein alignment with unit costs. Among minimal
/// alignments the backtrace prefers substitutions. Throws ContractError
/// when the reference has no words.
WerBreakdown wer(std::string_view reference, std::string_view hypothesis);

struct BleuScore {
  std::array<double, 4> precisions{};  // p1..p4 after smoothing
  double brevity_penalty = 0.0;
  double bleu = 0.0;
  bool empty_hypothesis = false;
};

/// Sentence BLEU up to 4-grams with per-reference clipping and the closest
/// reference length (shorter on ties). A zero match count for n >= 2 is
/// smoothed to 1 / (candidates + 1). An empty hypothesis scores 0 with the
/// flag set. Throws ContractError without references.
BleuScore bleu(const std::vector<std::string>& references, std::string_view hypothesis);

}  // namespace pdftemra::metrics
