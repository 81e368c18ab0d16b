// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "pdftemra/data/batch.hpp"
#include "pdftemra/data/corpus.hpp"
#include "pdftemra/data/tokenizer.hpp"
#include "pdftemra/distill/decode.hpp"
#include "pdftemra/distill/trainer.hpp"
#include "pdftemra/error.hpp"
#include "pdftemra/metrics/text_metrics.hpp"
#include "pdftemra/model/checkpoint.hpp"
#include "run_config.hpp"

namespace pdftemra::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<data::Record> read_records(const std::string& path) {
  return data::load_corpus(path, data::format_for_path(path)).records;
}

/// --config first, then any key given as a flag.
class ConfigFlags {
 public:
  void attach(CLI::App* app) {
    app->add_option("--config", config_path_, "Flat key=value config file; flags override it");
    for (const auto& key : config_keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      options_[key] = app->add_option(flag, values_[key], "Config key " + key);
    }
    no_residual_ = app->add_flag("--no-residual", "Same as --residual false");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_path_.empty()) apply_config_text(c, read_file(config_path_));
    for (const auto& key : config_keys()) {
      if (options_.at(key)->count() > 0) set_key(c, key, values_.at(key));
    }
    if (no_residual_->count() > 0) c.model.residual = false;
    return c;
  }

 private:
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
  CLI::Option* no_residual_ = nullptr;
};

data::Tokenizer tokenizer_for(const std::string& given, const std::string& checkpoint) {
  if (!given.empty()) return data::Tokenizer::load(given);
  const fs::path beside = fs::path(checkpoint).parent_path() / "tokenizer.json";
  if (!fs::exists(beside)) {
    throw ConfigError("no tokenizer.json next to " + checkpoint + "; pass --tokenizer");
  }
  return data::Tokenizer::load(beside.string());
}

void check_vocab(const data::Tokenizer& tok, const model::LanguageModel& m) {
  if (tok.size() != m.config().vocab_size) {
    throw ConfigError("tokenizer has " + std::to_string(tok.size()) + " symbols but the checkpoint expects " +
                      std::to_string(m.config().vocab_size));
  }
}

// ---- gen-data ----

struct GenDataArgs {
  std::string kind = "copy";
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::size_t min_len = 3;
  std::size_t max_len = 6;
  std::size_t vocab = 26;
  std::string out;
};

void gen_data(const GenDataArgs& a, std::ostream& out) {
  auto records = data::make_synthetic_corpus(data::parse_task(a.kind), a.size, a.min_len, a.max_len, a.vocab, a.seed);
  data::save_corpus(records, a.out, data::format_for_path(a.out));
  out << "wrote " << records.size() << " records to " << a.out << "\n";
}

// ---- tokenize ----

struct TokenizeArgs {
  std::vector<std::string> corpora;
  std::string out;
};

void tokenize(const TokenizeArgs& a, std::ostream& out) {
  std::vector<data::Record> all;
  for (const auto& path : a.corpora) {
    auto r = read_records(path);
    all.insert(all.end(), r.begin(), r.end());
  }
  auto tok = data::build_tokenizer(all);
  tok.save(a.out);
  out << "vocab_size=" << tok.size() << "\n";
}

// ---- train ----

struct TrainArgs {
  ConfigFlags flags;
  std::string out_dir;
  bool progress = false;
};

std::size_t longest_example(const std::vector<data::Record>& records, const data::Tokenizer& tok) {
  std::size_t n = 0;
  for (const auto& r : records) n = std::max(n, data::encode_record(r, tok).tokens.size());
  return n;
}

void train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig rc = a.flags.resolve();
  const distill::Regime regime = distill::parse_regime(rc.regime);
  if (rc.train_path.empty()) throw ConfigError("--train is required");

  std::unique_ptr<model::LanguageModel> teacher;
  if (regime == distill::Regime::kConsumerDistilled) {
    if (rc.teacher_path.empty()) throw ConfigError("--regime c-distilled requires --teacher <checkpoint>");
    teacher = model::load_checkpoint(rc.teacher_path);
  } else if (!rc.teacher_path.empty()) {
    throw ConfigError("--teacher is only used with --regime c-distilled");
  }

  const auto train_records = read_records(rc.train_path);
  std::vector<data::Record> val_records;
  if (!rc.validation_path.empty()) val_records = read_records(rc.validation_path);

  data::Tokenizer tok;
  if (!rc.tokenizer_path.empty()) {
    tok = data::Tokenizer::load(rc.tokenizer_path);
  } else if (teacher && fs::exists(fs::path(rc.teacher_path).parent_path() / "tokenizer.json")) {
    rc.tokenizer_path = (fs::path(rc.teacher_path).parent_path() / "tokenizer.json").string();
    tok = data::Tokenizer::load(rc.tokenizer_path);
  } else {
    std::vector<data::Record> all = train_records;
    all.insert(all.end(), val_records.begin(), val_records.end());
    tok = data::build_tokenizer(all);
  }

  if (rc.auto_vocab_size) {
    rc.model.vocab_size = tok.size();
  } else if (rc.model.vocab_size != tok.size()) {
    throw ConfigError("vocab_size " + std::to_string(rc.model.vocab_size) + " does not match the tokenizer (" +
                      std::to_string(tok.size()) + ")");
  }
  if (rc.auto_max_seq_len) {
    rc.model.max_seq_len = teacher ? teacher->config().max_seq_len
                                   : std::max(longest_example(train_records, tok), longest_example(val_records, tok));
  }
  rc.auto_vocab_size = false;
  rc.auto_max_seq_len = false;
  rc.model.validate();
  rc.train.validate();

  auto enc_train = data::encode_records(train_records, tok, rc.model.max_seq_len);
  auto enc_val = data::encode_records(val_records, tok, rc.model.max_seq_len);
  if (enc_train.rejected > 0) err << "skipped " << enc_train.rejected << " training records longer than max_seq_len\n";
  if (enc_val.rejected > 0) err << "skipped " << enc_val.rejected << " validation records longer than max_seq_len\n";

  out << "epochs=" << rc.train.epochs << " lr=" << format_double(rc.train.lr)
      << " T=" << format_double(rc.train.temperature) << " heads=" << rc.model.n_heads
      << " latent=" << rc.model.latent_dim << " embed=" << rc.model.embed_dim << "\n";

  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "resolved.cfg", format_config(rc));
  tok.save((dir / "tokenizer.json").string());

  const auto kind =
      regime == distill::Regime::kDistributorAlone ? model::ModelKind::kDistributor : model::ModelKind::kConsumer;
  auto student = model::make_model(kind, rc.model);
  std::vector<distill::EpochRecord> records;
  distill::train(regime, *student, teacher.get(), {enc_train.examples, enc_val.examples}, rc.train,
                 [&](const distill::EpochRecord& r) {
                   records.push_back(r);
                   write_file(dir / "metrics.csv", distill::format_csv(records));
                   if (a.progress) out << distill::csv_row(r) << "\n" << std::flush;
                 });
  model::save_checkpoint(*student, (dir / "model.ckpt").string());
  out << distill::csv_header() << "\n" << distill::csv_row(records.back()) << "\n";
}

// ---- eval ----

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string tokenizer;
  std::string config;
  std::string report;
  bool decode = false;
};

// Code points joined by spaces, so word-level WER counts characters.
std::string spaced_chars(const std::string& text) {
  const std::u32string cps = data::utf8_decode(text);
  std::string out;
  for (char32_t c : cps) {
    if (!out.empty()) out += ' ';
    out += data::utf8_encode(std::u32string(1, c));
  }
  return out;
}

void eval(const EvalArgs& a, std::ostream& out) {
  auto m = model::load_checkpoint(a.checkpoint);
  const auto tok = tokenizer_for(a.tokenizer, a.checkpoint);
  check_vocab(tok, *m);

  RunConfig rc;
  const fs::path beside = fs::path(a.checkpoint).parent_path() / "resolved.cfg";
  if (!a.config.empty()) {
    apply_config_text(rc, read_file(a.config));
  } else if (fs::exists(beside)) {
    apply_config_text(rc, read_file(beside.string()));
  }

  const auto records = read_records(a.data);
  const std::size_t len = m->config().max_seq_len;
  auto enc = data::encode_records(records, tok, len);
  const distill::Evaluation ev = distill::evaluate(*m, enc.examples, rc.train);

  nlohmann::ordered_json report;
  report["checkpoint"] = a.checkpoint;
  report["data"] = a.data;
  report["model_kind"] = std::string(model::to_string(m->kind()));
  report["examples"] = enc.examples.size();
  report["rejected"] = enc.rejected;
  report["scored_tokens"] = ev.scored;
  report["token_accuracy"] = ev.accuracy;
  report["cross_entropy"] = ev.loss;

  out << "examples=" << enc.examples.size() << " rejected=" << enc.rejected << " scored_tokens=" << ev.scored << "\n";
  out << "token_accuracy=" << format_double(ev.accuracy) << "\n";
  out << "cross_entropy=" << format_double(ev.loss) << "\n";

  if (a.decode) {
    std::vector<const data::Record*> kept;
    std::vector<std::string> prompts;
    for (const auto& r : records) {
      if (data::encode_record(r, tok).tokens.size() > len) continue;
      kept.push_back(&r);
      prompts.push_back(r.prompt);
    }
    const auto hyps = distill::greedy_decode(*m, tok, prompts);
    double wer_sum = 0.0, char_wer_sum = 0.0, bleu_sum = 0.0;
    std::size_t wer_n = 0, exact = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const std::string& ref = kept[i]->answer;
      exact += hyps[i] == ref;
      bleu_sum += metrics::bleu({ref}, hyps[i]).bleu;
      if (metrics::split_words(ref).empty()) continue;
      wer_sum += metrics::wer(ref, hyps[i]).wer;
      char_wer_sum += metrics::wer(spaced_chars(ref), spaced_chars(hyps[i])).wer;
      ++wer_n;
    }
    const double n = static_cast<double>(std::max<std::size_t>(kept.size(), 1));
    const double wn = static_cast<double>(std::max<std::size_t>(wer_n, 1));
    nlohmann::ordered_json d;
    d["decoded"] = kept.size();
    d["exact_match"] = static_cast<double>(exact) / n;
    d["wer"] = wer_sum / wn;
    d["char_wer"] = char_wer_sum / wn;
    d["bleu"] = bleu_sum / n;
    report["decode"] = d;
    out << "exact_match=" << format_double(d["exact_match"].get<double>())
        << " wer=" << format_double(d["wer"].get<double>()) << " char_wer=" << format_double(d["char_wer"].get<double>())
        << " bleu=" << format_double(d["bleu"].get<double>()) << "\n";
  } else {
    report["decode"] = nullptr;
  }
  if (!a.report.empty()) write_file(a.report, report.dump(2) + "\n");
}

// ---- infer ----

struct InferArgs {
  std::string checkpoint;
  std::string tokenizer;
  std::vector<std::string> prompts;
  std::string prompts_file;
};

void infer(const InferArgs& a, std::ostream& out) {
  if (a.prompts.empty() && a.prompts_file.empty()) throw ConfigError("pass --prompt or --prompts");
  auto m = model::load_checkpoint(a.checkpoint);
  const auto tok = tokenizer_for(a.tokenizer, a.checkpoint);
  check_vocab(tok, *m);
  std::vector<std::string> prompts = a.prompts;
  if (!a.prompts_file.empty()) {
    for (const auto& r : read_records(a.prompts_file)) prompts.push_back(r.prompt);
  }
  for (const auto& answer : distill::greedy_decode(*m, tok, prompts)) out << answer << "\n";
}

// ---- params ----

struct ParamsArgs {
  ConfigFlags flags;
  std::string checkpoint;
  std::string kind = "consumer";
};

void print_counts(const std::string& title, const model::ParamCount& c, std::ostream& out) {
  out << title << "\n";
  std::size_t width = 5;
  for (const auto& [name, n] : c.layers) width = std::max(width, name.size());
  auto row = [&](const std::string& name, std::size_t n) {
    out << "  " << name << std::string(width - name.size() + 2, ' ') << n << "\n";
  };
  for (const auto& [name, n] : c.layers) row(name, n);
  row("total", c.total);
}

void params(const ParamsArgs& a, std::ostream& out) {
  model::ModelConfig cfg;
  model::ModelKind kind = model::parse_model_kind(a.kind);
  if (!a.checkpoint.empty()) {
    auto m = model::load_checkpoint(a.checkpoint);
    cfg = m->config();
    kind = m->kind();
  } else {
    RunConfig rc = a.flags.resolve();
    if (rc.auto_vocab_size) {
      if (rc.tokenizer_path.empty()) throw ConfigError("params needs --vocab-size or --tokenizer");
      rc.model.vocab_size = data::Tokenizer::load(rc.tokenizer_path).size();
    }
    cfg = rc.model;
    cfg.validate();
  }
  model::Consumer consumer(cfg);
  model::Distributor distributor(cfg);
  const auto cc = consumer.count_params();
  const auto dc = distributor.count_params();
  const auto& mine = kind == model::ModelKind::kConsumer ? cc : dc;
  print_counts(std::string(model::to_string(kind)) + " (embed_dim=" + std::to_string(cfg.embed_dim) +
                   " n_heads=" + std::to_string(cfg.n_heads) + " n_blocks=" + std::to_string(cfg.n_blocks) + ")",
               mine, out);
  out << "comparison at equal dims: consumer=" << cc.total << " distributor=" << dc.total
      << " consumer<distributor=" << (cc.total < dc.total ? "yes" : "no") << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e) != nullptr) return kExitNumeric;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return kExitFailure;
  if (dynamic_cast<const Error*>(&e) != nullptr) return kExitUsage;
  return kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hartley-mixing student and attention teacher language models", "pdftemra"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 1 I/O failure, 2 usage or config error, 3 non-finite loss.\n"
      "BLEU is sentence-level with add-one smoothing of zero n-gram matches for n >= 2.");

  GenDataArgs gd;
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic prompt/answer corpus");
  gen->add_option("--kind", gd.kind, "copy, reverse or kv-lookup")->capture_default_str();
  gen->add_option("--size", gd.size, "Number of records")->required();
  gen->add_option("--seed", gd.seed, "Generator seed")->capture_default_str();
  gen->add_option("--min-len", gd.min_len, "Shortest prompt")->capture_default_str();
  gen->add_option("--max-len", gd.max_len, "Longest prompt")->capture_default_str();
  gen->add_option("--vocab", gd.vocab, "Symbols drawn from a-z, A-Z, 0-9")->capture_default_str();
  gen->add_option("--out", gd.out, "Output file; .tsv selects TSV, otherwise JSONL")->required();

  TokenizeArgs tk;
  auto* tokz = app.add_subcommand("tokenize", "Build a character tokenizer from corpora");
  tokz->add_option("--corpus", tk.corpora, "Corpus file (repeatable)")->required();
  tokz->add_option("--out", tk.out, "Tokenizer JSON output")->required();

  TrainArgs tr;
  auto* trn = app.add_subcommand("train", "Train a model; writes metrics.csv, model.ckpt, resolved.cfg, tokenizer.json");
  tr.flags.attach(trn);
  trn->add_option("--out", tr.out_dir, "Output directory")->required();
  trn->add_flag("--progress", tr.progress, "Print every epoch row");

  EvalArgs ev;
  auto* evl = app.add_subcommand("eval", "Token accuracy and cross-entropy, optionally WER and BLEU of greedy decodes");
  evl->add_option("--checkpoint", ev.checkpoint, "Model checkpoint")->required();
  evl->add_option("--data", ev.data, "Corpus file")->required();
  evl->add_option("--tokenizer", ev.tokenizer, "Tokenizer JSON; default tokenizer.json next to the checkpoint");
  evl->add_option("--config", ev.config, "Run config; default resolved.cfg next to the checkpoint");
  evl->add_option("--report", ev.report, "JSON report output");
  evl->add_flag("--decode", ev.decode, "Greedy-decode every prompt and score WER and BLEU against the answers");

  InferArgs in;
  auto* inf = app.add_subcommand("infer", "Greedy-decode answers for prompts");
  inf->add_option("--checkpoint", in.checkpoint, "Model checkpoint")->required();
  inf->add_option("--tokenizer", in.tokenizer, "Tokenizer JSON; default tokenizer.json next to the checkpoint");
  inf->add_option("--prompt", in.prompts, "Prompt text (repeatable)");
  inf->add_option("--prompts", in.prompts_file, "Corpus file whose prompts are decoded");

  ParamsArgs pa;
  auto* prm = app.add_subcommand("params", "Per-layer parameter counts and the consumer/distributor comparison");
  pa.flags.attach(prm);
  prm->add_option("--checkpoint", pa.checkpoint, "Count a checkpoint's model instead of a config");
  prm->add_option("--kind", pa.kind, "consumer or distributor")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) gen_data(gd, out);
    if (tokz->parsed()) tokenize(tk, out);
    if (trn->parsed()) train(tr, out, err);
    if (evl->parsed()) eval(ev, out);
    if (inf->parsed()) infer(in, out);
    if (prm->parsed()) params(pa, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace pdftemra::cli
