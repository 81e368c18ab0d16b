// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/distill/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdftemra/data/tokenizer.hpp"
#include "pdftemra/error.hpp"
#include "pdftemra/num/tape.hpp"

namespace pdftemra::distill {

namespace {

std::size_t vocab_of(const num::Tensor& logits) {
  if (logits.rank() < 1 || logits.size() == 0) throw DimensionError("logits need a trailing vocabulary axis");
  return logits.shape().back();
}

void check_targets(const num::Tensor& logits, std::span<const std::int32_t> targets) {
  const std::size_t v = vocab_of(logits);
  if (targets.size() * v != logits.size()) {
    throw DimensionError("got " + std::to_string(targets.size()) + " targets for " +
                         std::to_string(logits.size() / v) + " positions");
  }
  for (auto t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= v) throw IndexError("target id " + std::to_string(t) + " out of range");
  }
}

// Softmax of one row scaled by 1/T, written to `p`; returns log of the sum.
double soft_row(const double* x, std::size_t n, double inv_t, double* p) {
  const double mx = *std::max_element(x, x + n);
  double z = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    p[k] = std::exp((x[k] - mx) * inv_t);
    z += p[k];
  }
  for (std::size_t k = 0; k < n; ++k) p[k] /= z;
  return std::log(z) + mx * inv_t;
}

}  // namespace

num::Tensor soften(const num::Tensor& logits, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  const std::size_t v = vocab_of(logits);
  num::Tensor out(logits.shape());
  auto x = logits.values();
  auto y = out.values();
  for (std::size_t r = 0; r < logits.size() / v; ++r) soft_row(x.data() + r * v, v, 1.0 / temperature, y.data() + r * v);
  return out;
}

num::Tensor distill_loss(const num::Tensor& student_logits, const num::Tensor& teacher_logits, double temperature,
                         std::span<const std::int32_t> targets) {
  if (student_logits.shape() != teacher_logits.shape()) {
    throw DimensionError("student and teacher logits differ in shape: " + num::to_string(student_logits.shape()) +
                         " vs " + num::to_string(teacher_logits.shape()));
  }
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  const std::size_t v = vocab_of(student_logits);
  const std::size_t rows = student_logits.size() / v;
  if (!targets.empty()) check_targets(student_logits, targets);
  auto counted = [&](std::size_t r) { return targets.empty() || targets[r] != data::kPad; };
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows; ++r) n += counted(r) ? 1 : 0;
  if (n == 0) throw ContractError("distillation loss over zero positions");

  const double inv_t = 1.0 / temperature;
  const double t2 = temperature * temperature;
  auto s = student_logits.values();
  auto t = teacher_logits.values();
  // Cached (student softmax - teacher softmax) per counted row.
  std::vector<double> diff(student_logits.size(), 0.0);
  std::vector<double> q(v), p(v);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!counted(r)) continue;
    soft_row(t.data() + r * v, v, inv_t, q.data());
    const double lse = soft_row(s.data() + r * v, v, inv_t, p.data());
    double ce = 0.0;
    for (std::size_t k = 0; k < v; ++k) {
      if (q[k] > 0.0) ce -= q[k] * (s[r * v + k] * inv_t - lse);
      diff[r * v + k] = p[k] - q[k];
    }
    total += ce;
  }
  num::Tensor out = num::Tensor::scalar(t2 * total / static_cast<double>(n));
  num::Tape* tape = num::Tape::active_for({&student_logits});
  if (tape == nullptr) return out;
  auto rs = tape->ref(student_logits);
  const double factor = temperature / static_cast<double>(n);
  return tape->push(std::move(out), [=, diff = std::move(diff)](std::span<const double> g, num::Tape& tp) {
    auto gs = tp.grad(rs);
    for (std::size_t i = 0; i < diff.size(); ++i) gs[i] += g[0] * factor * diff[i];
  });
}

num::Tensor task_loss(const num::Tensor& logits, std::span<const std::int32_t> targets) {
  check_targets(logits, targets);
  const std::size_t v = vocab_of(logits);
  std::size_t n = 0;
  for (auto t : targets) n += t != data::kPad ? 1 : 0;
  if (n == 0) throw ContractError("task loss over an all-PAD batch");
  auto x = logits.values();
  std::vector<double> diff(logits.size(), 0.0);
  std::vector<double> p(v);
  double total = 0.0;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    if (targets[r] == data::kPad) continue;
    const double lse = soft_row(x.data() + r * v, v, 1.0, p.data());
    const auto y = static_cast<std::size_t>(targets[r]);
    total += lse - x[r * v + y];
    for (std::size_t k = 0; k < v; ++k) diff[r * v + k] = p[k] - (k == y ? 1.0 : 0.0);
  }
  num::Tensor out = num::Tensor::scalar(total / static_cast<double>(n));
  num::Tape* tape = num::Tape::active_for({&logits});
  if (tape == nullptr) return out;
  auto rx = tape->ref(logits);
  const double factor = 1.0 / static_cast<double>(n);
  return tape->push(std::move(out), [=, diff = std::move(diff)](std::span<const double> g, num::Tape& tp) {
    auto gx = tp.grad(rx);
    for (std::size_t i = 0; i < diff.size(); ++i) gx[i] += g[0] * factor * diff[i];
  });
}

double token_accuracy(const num::Tensor& logits, std::span<const std::int32_t> targets) {
  LossSums s;
  accumulate(s, logits, num::Tensor(), 1.0, targets);
  if (s.scored == 0) throw ContractError("token accuracy over an all-PAD batch");
  return static_cast<double>(s.correct) / static_cast<double>(s.scored);
}

void accumulate(LossSums& sums, const num::Tensor& logits, const num::Tensor& teacher_logits, double temperature,
                std::span<const std::int32_t> targets) {
  check_targets(logits, targets);
  const bool with_teacher = !teacher_logits.empty();
  if (with_teacher && teacher_logits.shape() != logits.shape()) {
    throw DimensionError("student and teacher logits differ in shape");
  }
  const std::size_t v = vocab_of(logits);
  const double inv_t = 1.0 / temperature;
  auto x = logits.values();
  std::vector<double> p(v), q(v);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    if (targets[r] == data::kPad) continue;
    const double* row = x.data() + r * v;
    const auto y = static_cast<std::size_t>(targets[r]);
    sums.task += soft_row(row, v, 1.0, p.data()) - row[y];
    const auto best = static_cast<std::size_t>(std::max_element(row, row + v) - row);
    sums.correct += best == y ? 1 : 0;
    ++sums.scored;
    if (with_teacher) {
      soft_row(teacher_logits.values().data() + r * v, v, inv_t, q.data());
      const double lse = soft_row(row, v, inv_t, p.data());
      double ce = 0.0;
      for (std::size_t k = 0; k < v; ++k) {
        if (q[k] > 0.0) ce -= q[k] * (row[k] * inv_t - lse);
      }
      sums.distill += temperature * temperature * ce;
    }
  }
}

}  // namespace pdftemra::distill
