// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/distill/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "pdftemra/distill/losses.hpp"
#include "pdftemra/error.hpp"
#include "pdftemra/num/ops.hpp"

namespace pdftemra::distill {

namespace {

constexpr std::uint64_t kShuffleStream = 11;

model::Inputs inputs_of(const data::TokenBatch& b) { return {b.tokens, b.segments, b.batch, b.len}; }

// The teacher is causal and fixed, so its logits at a position depend only
// on the tokens up to it. They are computed once per example on full rows
// and reused for every prefix row and epoch.
class TeacherLogits {
 public:
  TeacherLogits(model::LanguageModel& teacher, const std::vector<data::Example>& examples, std::size_t len)
      : vocab_(teacher.config().vocab_size), len_(len), rows_(examples.size()) {
    if (teacher.kind() != model::ModelKind::kDistributor) throw ContractError("the teacher must be a distributor");
    num::Tape::Paused off;
    for (const auto& b : data::make_batches(examples, data::full_rows(examples), 64, len, data::TargetMode::kAll)) {
      num::Tensor logits = teacher.forward(inputs_of(b), false);
      for (std::size_t r = 0; r < b.batch; ++r) {
        const auto first = logits.values().begin() + static_cast<std::ptrdiff_t>(r * len * vocab_);
        rows_[b.examples[r]].assign(first, first + static_cast<std::ptrdiff_t>(b.lengths[r] * vocab_));
      }
    }
  }

  // [batch, len, vocab]; positions past a row's visible tokens are zero.
  num::Tensor for_batch(const data::TokenBatch& b) const {
    num::Tensor out({b.batch, len_, vocab_});
    auto ov = out.values();
    for (std::size_t r = 0; r < b.batch; ++r) {
      const auto& cached = rows_.at(b.examples[r]);
      std::copy_n(cached.begin(), b.lengths[r] * vocab_, ov.begin() + static_cast<std::ptrdiff_t>(r * len_ * vocab_));
    }
    return out;
  }

 private:
  std::size_t vocab_;
  std::size_t len_;
  std::vector<std::vector<double>> rows_;
};

Evaluation evaluate_with(model::LanguageModel& model, const std::vector<data::Example>& examples,
                         const DistillConfig& config, const TeacherLogits* teacher) {
  num::Tape::Paused off;
  const std::size_t len = model.config().max_seq_len;
  LossSums sums;
  for (const auto& b : data::make_batches(examples, rows_for(model, examples, config), 64, len, config.targets)) {
    if (b.scored() == 0) continue;
    num::Tensor logits = model.forward(inputs_of(b), false);
    accumulate(sums, logits, teacher != nullptr ? teacher->for_batch(b) : num::Tensor(), config.temperature,
               b.targets);
  }
  if (sums.scored == 0) throw ContractError("evaluation set has no scored positions");
  const auto n = static_cast<double>(sums.scored);
  Evaluation e{sums.task / n, static_cast<double>(sums.correct) / n, sums.distill / n, sums.scored};
  if (!std::isfinite(e.loss) || !std::isfinite(e.distill_loss)) throw NumericError("non-finite evaluation loss");
  return e;
}

// Column prefix of each regime.
std::string_view prefix(Regime r) {
  switch (r) {
    case Regime::kDistributorAlone: return "D";
    case Regime::kConsumerAlone: return "C";
    case Regime::kConsumerDistilled: return "DP";
  }
  return "?";
}

}  // namespace

Regime parse_regime(std::string_view text) {
  if (text == "d-alone") return Regime::kDistributorAlone;
  if (text == "c-alone") return Regime::kConsumerAlone;
  if (text == "c-distilled") return Regime::kConsumerDistilled;
  throw ConfigError("unknown regime '" + std::string(text) + "' (expected d-alone, c-alone or c-distilled)");
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::kDistributorAlone: return "d-alone";
    case Regime::kConsumerAlone: return "c-alone";
    case Regime::kConsumerDistilled: return "c-distilled";
  }
  return "?";
}

void DistillConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("temperature must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
}

double EpochRecord::at(std::string_view column) const {
  auto it = values.find(std::string(column));
  if (it == values.end()) throw IndexError("column " + std::string(column) + " not recorded");
  return it->second;
}

std::string csv_header() {
  std::string h = "Epochs";
  for (auto c : kMetricColumns) (h += ',') += c;
  return h;
}

std::string csv_row(const EpochRecord& record) {
  std::string line = std::to_string(record.epoch);
  for (auto c : kMetricColumns) {
    line += ',';
    auto it = record.values.find(std::string(c));
    if (it == record.values.end()) continue;
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, it->second);
    line.append(buf, res.ptr);
  }
  return line;
}

std::string format_csv(const std::vector<EpochRecord>& records) {
  std::string out = csv_header() + '\n';
  for (const auto& r : records) out += csv_row(r) + '\n';
  return out;
}

std::vector<data::Row> rows_for(const model::LanguageModel& model, const std::vector<data::Example>& examples,
                                const DistillConfig& config) {
  if (model.kind() == model::ModelKind::kConsumer && config.consumer_prefix_rows) {
    return data::prefix_rows(examples, config.targets);
  }
  return data::full_rows(examples);
}

Evaluation evaluate(model::LanguageModel& model, const std::vector<data::Example>& examples,
                    const DistillConfig& config, model::LanguageModel* teacher) {
  std::optional<TeacherLogits> cache;
  if (teacher != nullptr) cache.emplace(*teacher, examples, model.config().max_seq_len);
  return evaluate_with(model, examples, config, cache ? &*cache : nullptr);
}

std::vector<EpochRecord> train(Regime regime, model::LanguageModel& student, model::LanguageModel* teacher,
                               const TrainInputs& data, const DistillConfig& config,
                               const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  const bool distilled = regime == Regime::kConsumerDistilled;
  const auto want = regime == Regime::kDistributorAlone ? model::ModelKind::kDistributor : model::ModelKind::kConsumer;
  if (student.kind() != want) {
    throw ContractError("regime " + std::string(to_string(regime)) + " trains a " +
                        std::string(model::to_string(want)) + " model");
  }
  if (distilled) {
    if (teacher == nullptr) throw ContractError("the c-distilled regime needs a trained teacher checkpoint");
    if (teacher->config().vocab_size != student.config().vocab_size) {
      throw ContractError("teacher and student vocabularies differ");
    }
    if (teacher->config().max_seq_len < student.config().max_seq_len) {
      throw ContractError("teacher max_seq_len is shorter than the student's");
    }
  }
  if (data.train.empty()) throw ContractError("training set is empty");

  std::optional<TeacherLogits> train_teacher, val_teacher;
  if (distilled) {
    train_teacher.emplace(*teacher, data.train, student.config().max_seq_len);
    val_teacher.emplace(*teacher, data.validation, student.config().max_seq_len);
  }
  const bool use_teacher = distilled && config.alpha < 1.0;
  const std::size_t len = student.config().max_seq_len;
  const std::string col(prefix(regime));
  num::Optimizer opt(config.optimizer, student.parameters(), config.lr);
  num::Rng shuffle = num::Rng(config.seed).fork(kShuffleStream);
  const auto train_rows = rows_for(student, data.train, config);

  std::vector<EpochRecord> records;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    auto batches = data::make_batches(data.train, train_rows, config.batch_size, len, config.targets, &shuffle);
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const auto& b = batches[bi];
      if (b.scored() == 0) continue;
      opt.zero_grad();
      num::Tensor t = use_teacher ? train_teacher->for_batch(b) : num::Tensor();
      num::Tape tape;
      num::Tape::Recording rec(tape);
      num::Tensor logits = student.forward(inputs_of(b), true);
      num::Tensor loss = task_loss(logits, b.targets);
      if (use_teacher) {
        loss = num::add(num::scale(loss, config.alpha),
                        num::scale(distill_loss(logits, t, config.temperature, b.targets), 1.0 - config.alpha));
      }
      if (!std::isfinite(loss.item())) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(bi + 1));
      }
      tape.backward(loss);
      opt.step();
    }

    EpochRecord r;
    r.epoch = epoch;
    try {
      const Evaluation tr = evaluate_with(student, data.train, config, distilled ? &*train_teacher : nullptr);
      r.values[col + "-TL"] = tr.loss;
      r.values[col + "-TA"] = tr.accuracy;
      if (distilled) r.values["DP-TDL"] = tr.distill_loss;
      if (!data.validation.empty()) {
        const Evaluation va = evaluate_with(student, data.validation, config, distilled ? &*val_teacher : nullptr);
        r.values[col + "-VL"] = va.loss;
        r.values[col + "-VA"] = va.accuracy;
        if (distilled) r.values["DP-VDL"] = va.distill_loss;
      }
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " after epoch " + std::to_string(epoch));
    }
    if (on_epoch) on_epoch(r);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace pdftemra::distill
