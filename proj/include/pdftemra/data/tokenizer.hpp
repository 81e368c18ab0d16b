// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pdftemra/data/corpus.hpp"

namespace pdftemra::data {

inline constexpr std::int32_t kPad = 0;
inline constexpr std::int32_t kUnk = 1;
inline constexpr std::int32_t kBos = 2;
inline constexpr std::int32_t kEos = 3;
inline constexpr std::int32_t kSep = 4;
inline constexpr std::int32_t kReserved = 5;

/// UTF-8 to code points; throws ParseError on malformed input.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

/// Character-level tokenizer: reserved ids 0..4, then one id per distinct code
/// point of the corpus in ascending code-point order.
class Tokenizer {
 public:
  Tokenizer() = default;
  explicit Tokenizer(std::map<char32_t, std::int32_t> vocab);

  std::size_t size() const noexcept { return kReserved + vocab_.size(); }
  const std::map<char32_t, std::int32_t>& vocab() const noexcept { return vocab_; }

  /// Unknown characters map to UNK.
  std::vector<std::int32_t> encode(std::string_view text) const;
  /// Reserved ids other than UNK produce no text; UNK becomes U+FFFD.
  std::string decode(const std::vector<std::int32_t>& ids) const;

  std::string to_json() const;
  static Tokenizer from_json(std::string_view text);
  void save(const std::string& path) const;
  static Tokenizer load(const std::string& path);

  bool operator==(const Tokenizer&) const = default;

 private:
  std::map<char32_t, std::int32_t> vocab_;
  std::vector<char32_t> chars_;  // id - kReserved -> code point
};

/// Throws ContractError on an empty corpus.
Tokenizer build_tokenizer(const std::vector<Record>& records);

}  // namespace pdftemra::data
