// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pdftemra/data/corpus.hpp"
#include "pdftemra/data/tokenizer.hpp"
#include "pdftemra/num/rng.hpp"

namespace pdftemra::data {

/// One encoded record: BOS prompt SEP answer EOS, unpadded.
struct Example {
  std::vector<std::int32_t> tokens;
  std::vector<std::int32_t> segments;  // 0 through SEP, 1 after
};

struct Encoded {
  std::vector<Example> examples;
  std::size_t rejected = 0;  // records longer than the limit
};

/// Records longer than `max_len` tokens are dropped and counted. Throws
/// ContractError when records is non-empty and every one is too long.
Encoded encode_records(const std::vector<Record>& records, const Tokenizer& tokenizer, std::size_t max_len);
Example encode_record(const Record& record, const Tokenizer& tokenizer);

/// Which next-token targets are scored.
enum class TargetMode {
  kAll,     // every position whose next token is not PAD
  kAnswer,  // only positions whose next token is in the answer segment
};

/// A batch row: example `example` with its first `visible` tokens shown.
/// A full row (visible == example length) is scored at every position
/// allowed by the target mode. A prefix row (visible < length) shows PAD with
/// segment 0 past `visible` and is scored only at position visible - 1,
/// against the next token of the example.
struct Row {
  std::size_t example = 0;
  std::size_t visible = 0;
};

std::vector<Row> full_rows(const std::vector<Example>& examples);
/// One prefix row per target the mode would score on the full row.
std::vector<Row> prefix_rows(const std::vector<Example>& examples, TargetMode mode);

struct TokenBatch {
  std::size_t batch = 0;
  std::size_t len = 0;
  std::vector<std::int32_t> tokens;    // [batch, len]
  std::vector<std::int32_t> segments;  // [batch, len]
  std::vector<std::int32_t> targets;   // [batch, len], PAD where not scored
  std::vector<std::size_t> lengths;    // visible tokens per row
  std::vector<std::size_t> examples;   // source example per row

  std::size_t scored() const noexcept;
};

TokenBatch make_batch(const std::vector<Example>& examples, std::span<const Row> rows, std::size_t len,
                      TargetMode mode);

/// Rows in consecutive batches of at most batch_size; rows are shuffled first
/// when `rng` is given.
std::vector<TokenBatch> make_batches(const std::vector<Example>& examples, std::vector<Row> rows,
                                     std::size_t batch_size, std::size_t len, TargetMode mode,
                                     num::Rng* rng = nullptr);

}  // namespace pdftemra::data
