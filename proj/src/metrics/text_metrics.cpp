// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/metrics/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "pdftemra/data/tokenizer.hpp"
#include "pdftemra/error.hpp"

namespace pdftemra::metrics {

namespace {

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const std::vector<std::string>& words, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    ++out[std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(i),
                                   words.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::u32string current;
  for (char32_t c : data::utf8_decode(text)) {
    if (is_space(c)) {
      if (!current.empty()) words.push_back(data::utf8_encode(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(data::utf8_encode(current));
  return words;
}

WerBreakdown wer(std::string_view reference, std::string_view hypothesis) {
  const auto ref = split_words(reference);
  const auto hyp = split_words(hypothesis);
  if (ref.empty()) throw ContractError("WER needs a non-empty reference");
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  WerBreakdown w;
  w.ref_len = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++w.substitutions;
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++w.deletions;
      --i;
    } else {
      ++w.insertions;
      --j;
    }
  }
  w.wer = static_cast<double>(w.substitutions + w.insertions + w.deletions) / static_cast<double>(n);
  return w;
}

BleuScore bleu(const std::vector<std::string>& references, std::string_view hypothesis) {
  if (references.empty()) throw ContractError("BLEU needs at least one reference");
  const auto hyp = split_words(hypothesis);
  BleuScore s;
  if (hyp.empty()) {
    s.empty_hypothesis = true;
    return s;
  }
  std::vector<std::vector<std::string>> refs;
  for (const auto& r : references) refs.push_back(split_words(r));

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand = ngrams(hyp, n);
    std::map<std::vector<std::string>, std::size_t> max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    }
    std::size_t matched = 0, total = 0;
    for (const auto& [g, c] : cand) {
      total += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) matched += std::min(c, it->second);
    }
    double p;
    if (matched == 0 && n >= 2) {
      p = 1.0 / static_cast<double>(total + 1);
    } else {
      p = total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total);
    }
    s.precisions[n - 1] = p;
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += 0.25 * std::log(p);
    }
  }

  const std::size_t c = hyp.size();
  std::size_t r = refs[0].size();
  for (const auto& ref : refs) {
    const auto dist = [&](std::size_t len) { return len > c ? len - c : c - len; };
    if (dist(ref.size()) < dist(r) || (dist(ref.size()) == dist(r) && ref.size() < r)) r = ref.size();
  }
  s.brevity_penalty = c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
  s.bleu = zero ? 0.0 : s.brevity_penalty * std::exp(log_sum);
  return s;
}

}  // namespace pdftemra::metrics
