// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "pdftemra/num/tensor.hpp"

namespace pdftemra::distill {

/// Softmax of logits / T along the last axis. Never recorded.
num::Tensor soften(const num::Tensor& logits, double temperature);

/// T^2 * mean over positions of -sum_v softmax(t/T)_v * log softmax(s/T)_v.
/// The teacher is treated as a constant. When `targets` is given, only
/// positions whose target is not PAD count. Throws DimensionError on a
/// shape mismatch, ConfigError for T <= 0, ContractError if no position
/// counts.
num::Tensor distill_loss(const num::Tensor& student_logits, const num::Tensor& teacher_logits, double temperature,
                         std::span<const std::int32_t> targets = {});

/// Mean next-token cross-entropy over positions whose target is not PAD.
/// Throws ContractError for an all-PAD batch.
num::Tensor task_loss(const num::Tensor& logits, std::span<const std::int32_t> targets);

/// Fraction of non-PAD positions whose argmax equals the target.
double token_accuracy(const num::Tensor& logits, std::span<const std::int32_t> targets);

/// Sums behind the means above, for aggregating over many batches.
struct LossSums {
  double task = 0.0;      // summed cross-entropy
  double distill = 0.0;   // summed T^2-scaled soft cross-entropy
  std::size_t correct = 0;
  std::size_t scored = 0;
};

/// Accumulates unrecorded sums for one batch; `teacher_logits` may be empty.
void accumulate(LossSums& sums, const num::Tensor& logits, const num::Tensor& teacher_logits, double temperature,
                std::span<const std::int32_t> targets);

}  // namespace pdftemra::distill
