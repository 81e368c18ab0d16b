// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "pdftemra/num/tape.hpp"

namespace pdftemra::num {

/// p <- p - lr * g for every parameter. Gradients are left untouched.
void sgd_step(const std::vector<Parameter*>& params, double lr);

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind parse_optimizer(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Applies one update rule to a fixed parameter list. Layers never see the
/// rule, so swapping SGD for Adam touches nothing else.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, std::vector<Parameter*> params, double lr);

  void step();
  void zero_grad();
  const std::vector<Parameter*>& params() const noexcept { return params_; }
  OptimizerKind kind() const noexcept { return kind_; }

 private:
  OptimizerKind kind_;
  std::vector<Parameter*> params_;
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long step_count_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace pdftemra::num
