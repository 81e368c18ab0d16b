// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pdftemra::data {

struct Record {
  std::string prompt;
  std::string answer;
  /// Free-form metadata; non-string JSON values are kept in serialized form.
  std::map<std::string, std::string> meta;

  bool operator==(const Record&) const = default;
};

enum class CorpusFormat { kJsonl, kTsv };

/// From a file name: ".tsv" selects TSV, anything else JSONL.
CorpusFormat format_for_path(std::string_view path) noexcept;
CorpusFormat parse_format(std::string_view text);

struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct Corpus {
  std::vector<Record> records;
  std::vector<LineIssue> malformed;
  std::vector<std::string> warnings;
};

/// Reads one record per non-blank line. Throws IoError if the file cannot be
/// opened; in strict mode any malformed line raises ParseError listing the
/// offending line numbers, otherwise such lines are skipped and reported.
Corpus load_corpus(const std::string& path, CorpusFormat format, bool strict = true);
Corpus parse_corpus(std::string_view text, CorpusFormat format, bool strict = true);

std::string format_corpus(const std::vector<Record>& records, CorpusFormat format);
void save_corpus(const std::vector<Record>& records, const std::string& path, CorpusFormat format);

enum class SyntheticTask { kCopy, kReverse, kKvLookup };

SyntheticTask parse_task(std::string_view text);
std::string_view to_string(SyntheticTask task) noexcept;

/// The first `vocab_size` symbols of a-z, A-Z, 0-9.
std::string synthetic_alphabet(std::size_t vocab_size);

/// `size` records drawn deterministically from `seed`. Prompt lengths are
/// uniform in [min_len, max_len] symbols; for kv-lookup the length is the
/// number of key:value pairs, written "k:v,k:v?k" with distinct keys, and the
/// answer is the queried value. Throws ConfigError for vocab_size < 2 or
/// outside [2, 62], non-positive sizes, or kv-lookup with more pairs than
/// symbols.
std::vector<Record> make_synthetic_corpus(SyntheticTask task, std::size_t size, std::size_t min_len,
                                          std::size_t max_len, std::size_t vocab_size, std::uint64_t seed);

struct Split {
  std::vector<Record> train;
  std::vector<Record> validation;
  std::vector<Record> test;
};

/// Seeded shuffle, then the first floor(n * train) records train, the next
/// floor(n * validation) validate and the rest test.
Split split_corpus(const std::vector<Record>& records, std::uint64_t seed, double train = 0.9,
                   double validation = 0.05);

}  // namespace pdftemra::data
