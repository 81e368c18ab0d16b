// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/data/corpus.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pdftemra/error.hpp"
#include "pdftemra/num/rng.hpp"

namespace pdftemra::data {

namespace {

using nlohmann::json;

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

Record parse_jsonl_line(std::string_view line) {
  json j = json::parse(line);
  if (!j.is_object()) throw ParseError("not a JSON object");
  if (!j.contains("prompt") || !j["prompt"].is_string()) throw ParseError("missing string field 'prompt'");
  if (!j.contains("answer") || !j["answer"].is_string()) throw ParseError("missing string field 'answer'");
  Record r{j["prompt"].get<std::string>(), j["answer"].get<std::string>(), {}};
  if (j.contains("meta")) {
    if (!j["meta"].is_object()) throw ParseError("'meta' must be an object");
    for (const auto& [k, v] : j["meta"].items()) r.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return r;
}

Record parse_tsv_line(std::string_view line) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) throw ParseError("expected two tab-separated columns");
  if (line.find('\t', tab + 1) != std::string_view::npos) throw ParseError("more than two columns");
  return Record{std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)), {}};
}

}  // namespace

CorpusFormat format_for_path(std::string_view path) noexcept {
  return path.ends_with(".tsv") ? CorpusFormat::kTsv : CorpusFormat::kJsonl;
}

CorpusFormat parse_format(std::string_view text) {
  if (text == "jsonl") return CorpusFormat::kJsonl;
  if (text == "tsv") return CorpusFormat::kTsv;
  throw ConfigError("unknown corpus format '" + std::string(text) + "' (expected jsonl or tsv)");
}

Corpus parse_corpus(std::string_view text, CorpusFormat format, bool strict) {
  Corpus c;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (blank(line)) continue;
    try {
      Record r = format == CorpusFormat::kJsonl ? parse_jsonl_line(line) : parse_tsv_line(line);
      if (blank(r.prompt)) throw ParseError("empty prompt");
      if (blank(r.answer)) throw ParseError("empty answer");
      c.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      c.malformed.push_back({line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const ParseError& e) {
      c.malformed.push_back({line_no, e.what()});
    }
  }
  if (strict && !c.malformed.empty()) {
    std::ostringstream msg;
    msg << c.malformed.size() << " malformed line(s):";
    for (const auto& m : c.malformed) msg << "\n  line " << m.line << ": " << m.reason;
    throw ParseError(msg.str());
  }
  if (c.records.empty() && c.malformed.empty()) c.warnings.push_back("corpus is empty");
  return c;
}

Corpus load_corpus(const std::string& path, CorpusFormat format, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), format, strict);
}

std::string format_corpus(const std::vector<Record>& records, CorpusFormat format) {
  std::string out;
  for (const auto& r : records) {
    if (format == CorpusFormat::kJsonl) {
      json j = {{"prompt", r.prompt}, {"answer", r.answer}};
      if (!r.meta.empty()) j["meta"] = r.meta;
      out += j.dump();
    } else {
      if (r.prompt.find_first_of("\t\n") != std::string::npos || r.answer.find_first_of("\t\n") != std::string::npos) {
        throw ContractError("record with a tab or newline cannot be written as TSV");
      }
      out += r.prompt + '\t' + r.answer;
    }
    out += '\n';
  }
  return out;
}

void save_corpus(const std::vector<Record>& records, const std::string& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus '" + path + "'");
  out << format_corpus(records, format);
  if (!out) throw IoError("failed writing corpus '" + path + "'");
}

SyntheticTask parse_task(std::string_view text) {
  if (text == "copy") return SyntheticTask::kCopy;
  if (text == "reverse") return SyntheticTask::kReverse;
  if (text == "kv-lookup") return SyntheticTask::kKvLookup;
  throw ConfigError("unknown task '" + std::string(text) + "' (expected copy, reverse or kv-lookup)");
}

std::string_view to_string(SyntheticTask task) noexcept {
  switch (task) {
    case SyntheticTask::kCopy: return "copy";
    case SyntheticTask::kReverse: return "reverse";
    case SyntheticTask::kKvLookup: return "kv-lookup";
  }
  return "?";
}

std::string synthetic_alphabet(std::size_t vocab_size) {
  static const std::string kSymbols = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  if (vocab_size < 2 || vocab_size > kSymbols.size()) {
    throw ConfigError("synthetic vocab_size must be in [2, " + std::to_string(kSymbols.size()) + "], got " +
                      std::to_string(vocab_size));
  }
  return kSymbols.substr(0, vocab_size);
}

std::vector<Record> make_synthetic_corpus(SyntheticTask task, std::size_t size, std::size_t min_len,
                                          std::size_t max_len, std::size_t vocab_size, std::uint64_t seed) {
  const std::string alphabet = synthetic_alphabet(vocab_size);
  if (size == 0) throw ConfigError("corpus size must be positive");
  if (min_len == 0 || max_len < min_len) throw ConfigError("need 0 < min_len <= max_len");
  if (task == SyntheticTask::kKvLookup && max_len > alphabet.size()) {
    throw ConfigError("kv-lookup needs at most one pair per distinct key symbol");
  }
  num::Rng rng(seed);
  std::vector<Record> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t n = min_len + rng.below(max_len - min_len + 1);
    Record r;
    if (task == SyntheticTask::kKvLookup) {
      std::string keys = alphabet;
      rng.shuffle(std::span<char>(keys));
      std::string values;
      for (std::size_t k = 0; k < n; ++k) {
        if (k) r.prompt += ',';
        const char v = alphabet[rng.below(alphabet.size())];
        r.prompt += keys[k];
        r.prompt += ':';
        r.prompt += v;
        values += v;
      }
      const std::size_t q = rng.below(n);
      r.prompt += '?';
      r.prompt += keys[q];
      r.answer = std::string(1, values[q]);
    } else {
      for (std::size_t k = 0; k < n; ++k) r.prompt += alphabet[rng.below(alphabet.size())];
      r.answer = task == SyntheticTask::kCopy ? r.prompt : std::string(r.prompt.rbegin(), r.prompt.rend());
    }
    out.push_back(std::move(r));
  }
  return out;
}

Split split_corpus(const std::vector<Record>& records, std::uint64_t seed, double train, double validation) {
  if (!(train >= 0.0 && validation >= 0.0 && train + validation <= 1.0)) {
    throw ConfigError("split ratios must be non-negative and sum to at most 1");
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  num::Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n = static_cast<double>(records.size());
  const auto n_train = static_cast<std::size_t>(std::floor(n * train));
  const auto n_val = std::min(records.size() - n_train, static_cast<std::size_t>(std::floor(n * validation)));
  Split s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& dst = i < n_train ? s.train : (i < n_train + n_val ? s.validation : s.test);
    dst.push_back(records[order[i]]);
  }
  return s;
}

}  // namespace pdftemra::data
