// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/data/batch.hpp"

#include <algorithm>

#include "pdftemra/error.hpp"

namespace pdftemra::data {

namespace {

bool scored(const Example& e, std::size_t target_pos, TargetMode mode) {
  if (e.tokens[target_pos] == kPad) return false;
  return mode == TargetMode::kAll || e.segments[target_pos] == 1;
}

}  // namespace

Example encode_record(const Record& record, const Tokenizer& tokenizer) {
  Example e;
  e.tokens.push_back(kBos);
  for (auto id : tokenizer.encode(record.prompt)) e.tokens.push_back(id);
  e.tokens.push_back(kSep);
  e.segments.assign(e.tokens.size(), 0);
  for (auto id : tokenizer.encode(record.answer)) e.tokens.push_back(id);
  e.tokens.push_back(kEos);
  e.segments.resize(e.tokens.size(), 1);
  return e;
}

Encoded encode_records(const std::vector<Record>& records, const Tokenizer& tokenizer, std::size_t max_len) {
  Encoded out;
  for (const auto& r : records) {
    Example e = encode_record(r, tokenizer);
    if (e.tokens.size() > max_len) {
      ++out.rejected;
    } else {
      out.examples.push_back(std::move(e));
    }
  }
  if (!records.empty() && out.examples.empty()) {
    throw ContractError("all " + std::to_string(records.size()) + " records exceed the maximum length of " +
                        std::to_string(max_len) + " tokens");
  }
  return out;
}

std::vector<Row> full_rows(const std::vector<Example>& examples) {
  std::vector<Row> rows;
  rows.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) rows.push_back({i, examples[i].tokens.size()});
  return rows;
}

std::vector<Row> prefix_rows(const std::vector<Example>& examples, TargetMode mode) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    for (std::size_t t = 1; t < e.tokens.size(); ++t) {
      if (scored(e, t, mode)) rows.push_back({i, t});
    }
  }
  return rows;
}

std::size_t TokenBatch::scored() const noexcept {
  return static_cast<std::size_t>(std::count_if(targets.begin(), targets.end(), [](auto t) { return t != kPad; }));
}

TokenBatch make_batch(const std::vector<Example>& examples, std::span<const Row> rows, std::size_t len,
                      TargetMode mode) {
  TokenBatch b;
  b.batch = rows.size();
  b.len = len;
  b.tokens.assign(rows.size() * len, kPad);
  b.segments.assign(rows.size() * len, 0);
  b.targets.assign(rows.size() * len, kPad);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row row = rows[r];
    if (row.example >= examples.size()) throw IndexError("batch row refers to a missing example");
    const Example& e = examples[row.example];
    const std::size_t n = e.tokens.size();
    if (row.visible == 0 || row.visible > n) throw ContractError("batch row shows no tokens or too many");
    if (row.visible > len) {
      throw LengthError("row of " + std::to_string(row.visible) + " tokens exceeds batch length " +
                        std::to_string(len));
    }
    std::copy_n(e.tokens.begin(), row.visible, b.tokens.begin() + static_cast<std::ptrdiff_t>(r * len));
    std::copy_n(e.segments.begin(), row.visible, b.segments.begin() + static_cast<std::ptrdiff_t>(r * len));
    if (row.visible < n) {
      b.targets[r * len + row.visible - 1] = e.tokens[row.visible];
    } else {
      for (std::size_t j = 0; j + 1 < n; ++j) {
        if (scored(e, j + 1, mode)) b.targets[r * len + j] = e.tokens[j + 1];
      }
    }
    b.lengths.push_back(row.visible);
    b.examples.push_back(row.example);
  }
  return b;
}

std::vector<TokenBatch> make_batches(const std::vector<Example>& examples, std::vector<Row> rows,
                                     std::size_t batch_size, std::size_t len, TargetMode mode, num::Rng* rng) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (rng != nullptr) rng->shuffle(std::span<Row>(rows));
  std::vector<TokenBatch> out;
  for (std::size_t start = 0; start < rows.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, rows.size() - start);
    out.push_back(make_batch(examples, std::span<const Row>(rows).subspan(start, n), len, mode));
  }
  return out;
}

}  // namespace pdftemra::data
