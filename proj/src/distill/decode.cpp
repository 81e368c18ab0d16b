// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/distill/decode.hpp"

#include <algorithm>

#include "pdftemra/error.hpp"
#include "pdftemra/num/tape.hpp"

namespace pdftemra::distill {

std::vector<std::string> greedy_decode(model::LanguageModel& model, const data::Tokenizer& tokenizer,
                                       const std::vector<std::string>& prompts) {
  const std::size_t len = model.config().max_seq_len;
  const std::size_t vocab = model.config().vocab_size;
  if (tokenizer.size() > vocab) throw ConfigError("tokenizer is larger than the model vocabulary");
  struct Seq {
    std::vector<std::int32_t> tokens;
    std::size_t answer_start = 0;
    bool done = false;
  };
  std::vector<Seq> seqs;
  for (const auto& p : prompts) {
    auto ids = tokenizer.encode(p);
    if (ids.empty()) throw ContractError("cannot decode from an empty prompt");
    Seq s;
    s.tokens.push_back(data::kBos);
    s.tokens.insert(s.tokens.end(), ids.begin(), ids.end());
    s.tokens.push_back(data::kSep);
    if (s.tokens.size() >= len) {
      throw LengthError("prompt of " + std::to_string(ids.size()) + " characters leaves no room within " +
                        std::to_string(len) + " tokens");
    }
    s.answer_start = s.tokens.size();
    seqs.push_back(std::move(s));
  }

  num::Tape::Paused off;
  while (true) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      if (!seqs[i].done) active.push_back(i);
    }
    if (active.empty()) break;
    std::vector<std::int32_t> tokens(active.size() * len, data::kPad), segments(active.size() * len, 0);
    for (std::size_t r = 0; r < active.size(); ++r) {
      const Seq& s = seqs[active[r]];
      std::copy(s.tokens.begin(), s.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(r * len));
      std::fill(segments.begin() + static_cast<std::ptrdiff_t>(r * len + s.answer_start),
                segments.begin() + static_cast<std::ptrdiff_t>(r * len + s.tokens.size()), 1);
    }
    num::Tensor logits = model.forward({tokens, segments, active.size(), len}, false);
    auto v = logits.values();
    for (std::size_t r = 0; r < active.size(); ++r) {
      Seq& s = seqs[active[r]];
      const double* row = v.data() + (r * len + s.tokens.size() - 1) * vocab;
      const auto next = static_cast<std::int32_t>(std::max_element(row, row + vocab) - row);
      if (next == data::kEos) {
        s.done = true;
        continue;
      }
      s.tokens.push_back(next);
      if (s.tokens.size() >= len) s.done = true;
    }
  }

  std::vector<std::string> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) {
    out.push_back(tokenizer.decode(std::vector<std::int32_t>(s.tokens.begin() + static_cast<std::ptrdiff_t>(s.answer_start),
                                                             s.tokens.end())));
  }
  return out;
}

}  // namespace pdftemra::distill
