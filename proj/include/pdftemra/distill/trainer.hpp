// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdftemra/data/batch.hpp"
#include "pdftemra/model/model.hpp"
#include "pdftemra/num/optim.hpp"

namespace pdftemra::distill {

enum class Regime { kDistributorAlone, kConsumerAlone, kConsumerDistilled };

/// Accepts d-alone, c-alone, c-distilled.
Regime parse_regime(std::string_view text);
std::string_view to_string(Regime regime) noexcept;

struct DistillConfig {
  std::size_t epochs = 25;
  double lr = 0.001;
  double temperature = 2.0;
  double alpha = 0.5;  // weight of the hard-label loss
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  num::OptimizerKind optimizer = num::OptimizerKind::kAdam;
  data::TargetMode targets = data::TargetMode::kAnswer;
  /// Train and score the Consumer on one row per scored prefix, since its
  /// token mixing sees the whole row.
  bool consumer_prefix_rows = true;

  /// Throws ConfigError.
  void validate() const;
  bool operator==(const DistillConfig&) const = default;
};

/// Metrics CSV columns after "Epochs", in file order.
inline constexpr std::array<std::string_view, 14> kMetricColumns = {
    "D-TL", "D-VL", "DP-TL", "DP-TDL", "DP-VL", "DP-VDL", "C-TL",
    "C-VL", "D-TA", "D-VA",  "DP-TA",  "DP-VA", "C-TA",   "C-VA"};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  std::map<std::string, double> values;  // only the columns of the regime run

  /// Throws IndexError when the column was not recorded.
  double at(std::string_view column) const;
};

std::string csv_header();
/// One CSV line without a newline; missing columns stay empty, values are
/// written in shortest round-trip form.
std::string csv_row(const EpochRecord& record);
std::string format_csv(const std::vector<EpochRecord>& records);

/// Aggregate task loss, accuracy and (with a teacher) distillation loss of
/// `model` in eval mode over `rows`.
struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  double distill_loss = 0.0;
  std::size_t scored = 0;
};

/// Rows used for `model` under `config`: prefix rows for the Consumer when
/// enabled, full rows otherwise.
std::vector<data::Row> rows_for(const model::LanguageModel& model, const std::vector<data::Example>& examples,
                                const DistillConfig& config);

Evaluation evaluate(model::LanguageModel& model, const std::vector<data::Example>& examples,
                    const DistillConfig& config, model::LanguageModel* teacher = nullptr);

struct TrainInputs {
  const std::vector<data::Example>& train;
  const std::vector<data::Example>& validation;
};

/// Runs `config.epochs` epochs of seeded mini-batch training and returns one
/// record per epoch. The distilled regime needs `teacher` (ContractError
/// otherwise) and minimizes alpha * task + (1 - alpha) * distill; with
/// alpha == 1 the teacher is never consulted during updates. A non-finite
/// loss throws NumericError naming the epoch and batch.
std::vector<EpochRecord> train(Regime regime, model::LanguageModel& student, model::LanguageModel* teacher,
                               const TrainInputs& data, const DistillConfig& config,
                               const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace pdftemra::distill
