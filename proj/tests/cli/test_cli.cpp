// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "pdftemra/distill/trainer.hpp"
#include "pdftemra/error.hpp"
#include "pdftemra/model/checkpoint.hpp"
#include "run_config.hpp"

namespace pdftemra::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double csv_cell(const fs::path& csv, const std::string& column) {
  auto rows = lines_of(slurp(csv));
  auto header = split_csv(rows.front());
  auto last = split_csv(rows.back());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return std::stod(last.at(i));
  }
  ADD_FAILURE() << "no column " << column;
  return 0.0;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pdftemra_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Small corpus pair and a one-epoch tiny-model training run.
  void make_corpora(std::size_t n_train = 24) {
    ASSERT_EQ(call({"gen-data", "--size", std::to_string(n_train), "--seed", "1", "--vocab", "8", "--min-len", "1",
                    "--max-len", "3", "--out", path("train.jsonl")})
                  .code,
              0);
    ASSERT_EQ(call({"gen-data", "--size", "8", "--seed", "2", "--vocab", "8", "--min-len", "1", "--max-len", "3",
                    "--out", path("val.jsonl")})
                  .code,
              0);
  }

  std::vector<std::string> small_train(const std::string& regime, const std::string& out, int epochs = 1) const {
    return {"train",       "--regime",    regime,          "--train",  path("train.jsonl"), "--validation",
            path("val.jsonl"), "--out",   path(out),       "--epochs", std::to_string(epochs), "--embed-dim",
            "16",          "--n-heads",   "3",             "--latent-dim", "24",            "--batch-size",
            "8",           "--seed",      "3"};
  }

  fs::path dir_;
};

// ---- gen-data ----

TEST_F(Cli, GenDataWritesRequestedCount) {
  auto r = call({"gen-data", "--kind", "copy", "--size", "2000", "--seed", "7", "--out", path("c.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(slurp(path("c.jsonl"))).size(), 2000u);
  EXPECT_NE(r.out.find("2000"), std::string::npos);
}

TEST_F(Cli, GenDataIsByteIdentical) {
  call({"gen-data", "--kind", "reverse", "--size", "50", "--seed", "7", "--out", path("a.jsonl")});
  call({"gen-data", "--kind", "reverse", "--size", "50", "--seed", "7", "--out", path("b.jsonl")});
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_FALSE(slurp(path("a.jsonl")).empty());
}

TEST_F(Cli, GenDataErrors) {
  EXPECT_EQ(call({"gen-data", "--size", "0", "--out", path("z.jsonl")}).code, kExitUsage);
  EXPECT_EQ(call({"gen-data", "--size", "3", "--kind", "sort", "--out", path("z.jsonl")}).code, kExitUsage);
  EXPECT_EQ(call({"gen-data", "--size", "3"}).code, kExitUsage);
  EXPECT_EQ(call({"gen-data", "--size", "3", "--out", path("missing/dir/z.jsonl")}).code, kExitFailure);
}

TEST_F(Cli, HelpAndUnknownCommand) {
  auto h = call({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("Exit codes"), std::string::npos);
  EXPECT_EQ(call({}).code, kExitUsage);
  EXPECT_EQ(call({"frobnicate"}).code, kExitUsage);
}

// ---- tokenize ----

TEST_F(Cli, TokenizeBuildsVocabulary) {
  make_corpora();
  auto r = call({"tokenize", "--corpus", path("train.jsonl"), "--corpus", path("val.jsonl"), "--out", path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "vocab_size=13\n");
  EXPECT_TRUE(fs::exists(path("t.json")));
  EXPECT_EQ(call({"tokenize", "--corpus", path("nope.jsonl"), "--out", path("t.json")}).code, kExitFailure);
}

// ---- run config ----

TEST(RunConfigText, RoundTripAndOverrides) {
  RunConfig c;
  apply_config_text(c, "# comment\n\nepochs = 7\nlr=0.01\nregime=c-alone\nresidual=false\ntargets=all\n");
  EXPECT_EQ(c.train.epochs, 7u);
  EXPECT_EQ(c.train.lr, 0.01);
  EXPECT_EQ(c.regime, "c-alone");
  EXPECT_FALSE(c.model.residual);
  EXPECT_EQ(c.train.targets, data::TargetMode::kAll);
  RunConfig back;
  apply_config_text(back, format_config(c));
  EXPECT_EQ(format_config(back), format_config(c));
  EXPECT_EQ(back.model, c.model);
  EXPECT_EQ(back.train, c.train);
}

TEST(RunConfigText, Errors) {
  RunConfig c;
  EXPECT_THROW(apply_config_text(c, "epochs=ten\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "colour=blue\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "justakey\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "residual=maybe\n"), ConfigError);
  try {
    apply_config_text(c, "epochs=1\n\nlr=x\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(RunConfigText, SeedDrivesModelAndTraining) {
  RunConfig c;
  set_key(c, "seed", "42");
  EXPECT_EQ(c.model.seed, 42u);
  EXPECT_EQ(c.train.seed, 42u);
  EXPECT_EQ(get_key(c, "max_seq_len"), "auto");
}

// ---- train ----

TEST_F(Cli, TrainEchoesDefaults) {
  ASSERT_EQ(call({"gen-data", "--size", "4", "--seed", "1", "--vocab", "4", "--min-len", "1", "--max-len", "2",
                  "--out", path("tiny.jsonl")})
                .code,
            0);
  auto r = call({"train", "--train", path("tiny.jsonl"), "--out", path("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out).front(), "epochs=25 lr=0.001 T=2 heads=10 latent=100 embed=256");
  EXPECT_EQ(lines_of(slurp(path("run/metrics.csv"))).size(), 26u);
}

TEST_F(Cli, TrainWritesOneRowPerEpochAndSelfContainedDir) {
  make_corpora();
  auto r = call(small_train("c-alone", "run"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto csv = lines_of(slurp(path("run/metrics.csv")));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[0], distill::csv_header());
  EXPECT_EQ(lines_of(r.out).back(), csv[1]);
  EXPECT_TRUE(fs::exists(path("run/model.ckpt")));
  EXPECT_TRUE(fs::exists(path("run/tokenizer.json")));
  const std::string cfg = slurp(path("run/resolved.cfg"));
  // BOS + 3 + SEP + 3 + EOS for the longest records.
  EXPECT_NE(cfg.find("max_seq_len=9\n"), std::string::npos);
  EXPECT_NE(cfg.find("vocab_size=13\n"), std::string::npos);
  EXPECT_NE(cfg.find("embed_dim=16\n"), std::string::npos);

  // Rerunning from the resolved config alone reproduces the run.
  auto again = call({"train", "--config", path("run/resolved.cfg"), "--out", path("rerun")});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(slurp(path("rerun/metrics.csv")), slurp(path("run/metrics.csv")));
  EXPECT_EQ(slurp(path("rerun/model.ckpt")), slurp(path("run/model.ckpt")));
  EXPECT_EQ(slurp(path("rerun/resolved.cfg")), cfg);
}

TEST_F(Cli, TrainIsByteIdenticalAcrossRuns) {
  make_corpora();
  ASSERT_EQ(call(small_train("d-alone", "a", 2)).code, 0);
  ASSERT_EQ(call(small_train("d-alone", "b", 2)).code, 0);
  for (const char* f : {"metrics.csv", "model.ckpt", "resolved.cfg", "tokenizer.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  auto other = small_train("d-alone", "c", 2);
  other.back() = "4";
  ASSERT_EQ(call(other).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "model.ckpt"), slurp(dir_ / "c" / "model.ckpt"));
}

TEST_F(Cli, ConfigFileThenFlagWins) {
  make_corpora();
  {
    std::ofstream(path("base.cfg")) << "epochs=3\nembed_dim=12\nn_heads=2\nlatent_dim=8\n";
  }
  auto r = call({"train", "--config", path("base.cfg"), "--epochs", "1", "--train", path("train.jsonl"), "--out",
                 path("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out).front(), "epochs=1 lr=0.001 T=2 heads=2 latent=8 embed=12");
  EXPECT_EQ(lines_of(slurp(path("run/metrics.csv"))).size(), 2u);

  auto plain = call({"train", "--config", path("base.cfg"), "--epochs", "1", "--no-residual", "--train",
                     path("train.jsonl"), "--out", path("plain")});
  ASSERT_EQ(plain.code, 0) << plain.err;
  EXPECT_NE(slurp(path("plain/resolved.cfg")).find("residual=false\n"), std::string::npos);
  EXPECT_NE(slurp(path("run/resolved.cfg")).find("residual=true\n"), std::string::npos);
}

TEST_F(Cli, DistilledRunNeedsTeacher) {
  make_corpora();
  auto r = call(small_train("c-distilled", "run"));
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--teacher"), std::string::npos);

  ASSERT_EQ(call(small_train("d-alone", "teacher")).code, 0);
  auto args = small_train("c-distilled", "student");
  args.insert(args.end(), {"--teacher", path("teacher/model.ckpt")});
  auto ok = call(args);
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_GT(csv_cell(path("student/metrics.csv"), "DP-TDL"), 0.0);

  // A Consumer checkpoint is not a valid teacher.
  auto bad = small_train("c-distilled", "student2");
  bad.insert(bad.end(), {"--teacher", path("student/model.ckpt")});
  EXPECT_EQ(call(bad).code, kExitUsage);
}

TEST_F(Cli, TrainUsageErrors) {
  make_corpora();
  auto a = small_train("c-alone", "run");
  a.insert(a.end(), {"--vocab-size", "99"});
  EXPECT_EQ(call(a).code, kExitUsage);
  auto b = small_train("x-alone", "run");
  EXPECT_EQ(call(b).code, kExitUsage);
  auto c = small_train("c-alone", "run");
  c.insert(c.end(), {"--alpha", "2"});
  EXPECT_EQ(call(c).code, kExitUsage);
  EXPECT_EQ(call({"train", "--out", path("run")}).code, kExitUsage);
}

TEST_F(Cli, NonFiniteLossExitsThree) {
  make_corpora();
  auto args = small_train("d-alone", "run", 3);
  args.insert(args.end(), {"--lr", "1e300"});
  auto r = call(args);
  EXPECT_EQ(r.code, kExitNumeric) << r.err;
  EXPECT_NE(r.err.find("non-finite"), std::string::npos);
}

// ---- eval ----

TEST_F(Cli, EvalMatchesFinalCsvRowAndReportSchema) {
  make_corpora();
  ASSERT_EQ(call(small_train("c-alone", "run", 2)).code, 0);
  auto r = call({"eval", "--checkpoint", path("run/model.ckpt"), "--data", path("train.jsonl"), "--report",
                 path("report.json"), "--decode"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_NEAR(report["token_accuracy"].get<double>(), csv_cell(path("run/metrics.csv"), "C-TA"), 1e-9);
  EXPECT_NEAR(report["cross_entropy"].get<double>(), csv_cell(path("run/metrics.csv"), "C-TL"), 1e-9);

  for (const char* key : {"checkpoint", "data", "model_kind"}) EXPECT_TRUE(report[key].is_string()) << key;
  for (const char* key : {"examples", "rejected", "scored_tokens"}) {
    EXPECT_TRUE(report[key].is_number_unsigned()) << key;
  }
  for (const char* key : {"token_accuracy", "cross_entropy"}) EXPECT_TRUE(report[key].is_number()) << key;
  EXPECT_EQ(report["model_kind"], "consumer");
  EXPECT_EQ(report["examples"], 24);
  ASSERT_TRUE(report["decode"].is_object());
  for (const char* key : {"exact_match", "wer", "char_wer", "bleu"}) {
    EXPECT_TRUE(report["decode"][key].is_number()) << key;
    EXPECT_GE(report["decode"][key].get<double>(), 0.0) << key;
  }
  EXPECT_LE(report["decode"]["bleu"].get<double>(), 1.0);
  EXPECT_EQ(report["decode"]["decoded"], 24);

  // Without --decode the decode block is null.
  ASSERT_EQ(call({"eval", "--checkpoint", path("run/model.ckpt"), "--data", path("val.jsonl"), "--report",
                  path("plain.json")})
                .code,
            0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(path("plain.json")))["decode"].is_null());
}

TEST_F(Cli, EvalReportIsByteIdentical) {
  make_corpora();
  ASSERT_EQ(call(small_train("d-alone", "run")).code, 0);
  for (const char* name : {"r1.json", "r2.json"}) {
    ASSERT_EQ(call({"eval", "--checkpoint", path("run/model.ckpt"), "--data", path("val.jsonl"), "--decode",
                    "--report", path(name)})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("r1.json")), slurp(path("r2.json")));
}

TEST_F(Cli, EvalTokenizerMismatchExitsTwo) {
  make_corpora();
  ASSERT_EQ(call(small_train("d-alone", "run")).code, 0);
  ASSERT_EQ(call({"gen-data", "--size", "20", "--vocab", "20", "--out", path("wide.jsonl")}).code, 0);
  ASSERT_EQ(call({"tokenize", "--corpus", path("wide.jsonl"), "--out", path("wide.json")}).code, 0);
  auto r = call({"eval", "--checkpoint", path("run/model.ckpt"), "--data", path("val.jsonl"), "--tokenizer",
                 path("wide.json")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("tokenizer"), std::string::npos);
  EXPECT_EQ(call({"eval", "--checkpoint", path("nope.ckpt"), "--data", path("val.jsonl")}).code, kExitFailure);
}

// A teacher that memorizes a handful of copy records decodes them exactly.
TEST_F(Cli, MemorizedModelHasZeroWerAndCopiesPrompt) {
  {
    std::ofstream f(path("mem.jsonl"));
    for (const char* s : {"abcd", "dcba", "bad", "cab", "ab", "dd", "c", "bcda"}) {
      f << "{\"prompt\":\"" << s << "\",\"answer\":\"" << s << "\"}\n";
    }
  }
  auto r = call({"train", "--regime", "d-alone", "--train", path("mem.jsonl"), "--out", path("run"), "--epochs",
                 "200", "--lr", "0.003", "--embed-dim", "32", "--n-heads", "3", "--latent-dim", "24", "--dropout", "0",
                 "--batch-size", "8", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(csv_cell(path("run/metrics.csv"), "D-TA"), 1.0);
  auto e = call({"eval", "--checkpoint", path("run/model.ckpt"), "--data", path("mem.jsonl"), "--decode", "--report",
                 path("mem.json")});
  ASSERT_EQ(e.code, 0) << e.err;
  auto report = nlohmann::json::parse(slurp(path("mem.json")));
  EXPECT_EQ(report["decode"]["wer"].get<double>(), 0.0);
  EXPECT_EQ(report["decode"]["char_wer"].get<double>(), 0.0);
  EXPECT_EQ(report["decode"]["exact_match"].get<double>(), 1.0);
  EXPECT_EQ(report["decode"]["bleu"].get<double>(), 1.0);

  auto i = call({"infer", "--checkpoint", path("run/model.ckpt"), "--prompt", "abcd"});
  ASSERT_EQ(i.code, 0) << i.err;
  EXPECT_EQ(i.out, "abcd\n");
}

// ---- infer ----

TEST_F(Cli, InferIsDeterministicAndRejectsBadPrompts) {
  make_corpora();
  ASSERT_EQ(call(small_train("c-alone", "run")).code, 0);
  const std::vector<std::string> args = {"infer", "--checkpoint", path("run/model.ckpt"), "--prompt", "abc",
                                         "--prompt", "h"};
  auto a = call(args), b = call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines_of(a.out).size(), 2u);

  auto from_file = call({"infer", "--checkpoint", path("run/model.ckpt"), "--prompts", path("val.jsonl")});
  ASSERT_EQ(from_file.code, 0);
  EXPECT_EQ(lines_of(from_file.out).size(), 8u);

  EXPECT_EQ(call({"infer", "--checkpoint", path("run/model.ckpt"), "--prompt", ""}).code, kExitUsage);
  EXPECT_EQ(call({"infer", "--checkpoint", path("run/model.ckpt"), "--prompt", "abcdefgh"}).code, kExitUsage);
  EXPECT_EQ(call({"infer", "--checkpoint", path("run/model.ckpt")}).code, kExitUsage);
}

// ---- params ----

TEST_F(Cli, ParamsTableMatchesCountParams) {
  auto r = call({"params", "--vocab-size", "31", "--max-seq-len", "16", "--embed-dim", "64", "--n-blocks", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  model::ModelConfig cfg;
  cfg.vocab_size = 31;
  cfg.max_seq_len = 16;
  cfg.embed_dim = 64;
  cfg.n_blocks = 2;
  model::Consumer c(cfg);
  model::Distributor d(cfg);
  const auto cc = c.count_params();
  const auto dc = d.count_params();
  EXPECT_NE(r.out.find("  blocks.0.hartley    0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("  blocks.1.hartley    0\n"), std::string::npos);
  EXPECT_NE(r.out.find("total               " + std::to_string(cc.total) + "\n"), std::string::npos);
  EXPECT_NE(r.out.find("consumer=" + std::to_string(cc.total) + " distributor=" + std::to_string(dc.total) +
                       " consumer<distributor=yes"),
            std::string::npos);
}

TEST_F(Cli, ParamsFromCheckpointAndErrors) {
  make_corpora();
  ASSERT_EQ(call(small_train("d-alone", "run")).code, 0);
  auto r = call({"params", "--checkpoint", path("run/model.ckpt")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = model::load_checkpoint(path("run/model.ckpt"));
  EXPECT_EQ(lines_of(r.out).front().rfind("distributor", 0), 0u);
  EXPECT_NE(r.out.find("total               " + std::to_string(m->count_params().total) + "\n"),
            std::string::npos);
  EXPECT_EQ(call({"params"}).code, kExitUsage);
  EXPECT_EQ(call({"params", "--vocab-size", "10", "--kind", "mlp"}).code, kExitUsage);
}

}  // namespace
}  // namespace pdftemra::cli
