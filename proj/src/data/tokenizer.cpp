// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/data/tokenizer.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pdftemra/error.hpp"

namespace pdftemra::data {

namespace {

using nlohmann::json;

const std::pair<const char*, std::int32_t> kReservedNames[] = {
    {"PAD", kPad}, {"UNK", kUnk}, {"BOS", kBos}, {"EOS", kEos}, {"SEP", kSep}};

}  // namespace

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      extra = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
      throw ParseError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + extra >= text.size()) throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) throw ParseError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
      cp = (cp << 6) | (b & 0x3F);
    }
    if (extra > 0 && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
      throw ParseError("invalid UTF-8 code point at offset " + std::to_string(i));
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
  return out;
}

Tokenizer::Tokenizer(std::map<char32_t, std::int32_t> vocab) : vocab_(std::move(vocab)) {
  chars_.assign(vocab_.size(), 0);
  std::vector<bool> seen(vocab_.size(), false);
  for (const auto& [cp, id] : vocab_) {
    const auto slot = static_cast<std::size_t>(id - kReserved);
    if (id < kReserved || slot >= vocab_.size() || seen[slot]) {
      throw ParseError("tokenizer ids must be dense and start at " + std::to_string(kReserved));
    }
    seen[slot] = true;
    chars_[slot] = cp;
  }
}

std::vector<std::int32_t> Tokenizer::encode(std::string_view text) const {
  std::vector<std::int32_t> ids;
  for (char32_t cp : utf8_decode(text)) {
    auto it = vocab_.find(cp);
    ids.push_back(it == vocab_.end() ? kUnk : it->second);
  }
  return ids;
}

std::string Tokenizer::decode(const std::vector<std::int32_t>& ids) const {
  std::u32string out;
  for (auto id : ids) {
    if (id == kUnk) {
      out.push_back(U'\uFFFD');
    } else if (id >= kReserved) {
      const auto slot = static_cast<std::size_t>(id - kReserved);
      if (slot >= chars_.size()) throw IndexError("token id " + std::to_string(id) + " outside the vocabulary");
      out.push_back(chars_[slot]);
    } else if (id < 0) {
      throw IndexError("negative token id");
    }
  }
  return utf8_encode(out);
}

std::string Tokenizer::to_json() const {
  json reserved = json::object();
  for (const auto& [name, id] : kReservedNames) reserved[name] = id;
  json vocab = json::object();
  for (const auto& [cp, id] : vocab_) vocab[utf8_encode(std::u32string(1, cp))] = id;
  return json{{"reserved", reserved}, {"vocab", vocab}}.dump(1);
}

Tokenizer Tokenizer::from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    for (const auto& [name, id] : kReservedNames) {
      if (j.at("reserved").at(name).get<std::int32_t>() != id) {
        throw ParseError(std::string("tokenizer reserves a different id for ") + name);
      }
    }
    std::map<char32_t, std::int32_t> vocab;
    for (const auto& [key, id] : j.at("vocab").items()) {
      auto cps = utf8_decode(key);
      if (cps.size() != 1) throw ParseError("tokenizer key '" + key + "' is not a single character");
      vocab[cps[0]] = id.get<std::int32_t>();
    }
    return Tokenizer(std::move(vocab));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed tokenizer file: ") + e.what());
  }
}

void Tokenizer::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write tokenizer '" + path + "'");
  out << to_json() << '\n';
  if (!out) throw IoError("failed writing tokenizer '" + path + "'");
}

Tokenizer Tokenizer::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read tokenizer '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

Tokenizer build_tokenizer(const std::vector<Record>& records) {
  if (records.empty()) throw ContractError("cannot build a tokenizer from an empty corpus");
  std::set<char32_t> chars;
  for (const auto& r : records) {
    for (char32_t cp : utf8_decode(r.prompt)) chars.insert(cp);
    for (char32_t cp : utf8_decode(r.answer)) chars.insert(cp);
  }
  std::map<char32_t, std::int32_t> vocab;
  std::int32_t next = kReserved;
  for (char32_t cp : chars) vocab[cp] = next++;
  return Tokenizer(std::move(vocab));
}

}  // namespace pdftemra::data
