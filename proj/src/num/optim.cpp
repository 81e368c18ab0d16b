// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/num/optim.hpp"

#include <cmath>

#include "pdftemra/error.hpp"

namespace pdftemra::num {

void sgd_step(const std::vector<Parameter*>& params, double lr) {
  if (!(lr >= 0.0)) throw ConfigError("learning rate must be non-negative");
  for (Parameter* p : params) {
    if (p->grad.size() != p->value.size()) {
      throw DimensionError("sgd_step: gradient of " + p->name + " has " + std::to_string(p->grad.size()) +
                           " entries, parameter has " + std::to_string(p->value.size()));
    }
    auto v = p->value.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * p->grad[i];
  }
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kSgd ? "sgd" : "adam"; }

Optimizer::Optimizer(OptimizerKind kind, std::vector<Parameter*> params, double lr)
    : kind_(kind), params_(std::move(params)), lr_(lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  for (Parameter* p : params_) {
    p->zero_grad();
    if (kind_ == OptimizerKind::kAdam) {
      m_.emplace_back(p->size(), 0.0);
      v_.emplace_back(p->size(), 0.0);
    }
  }
}

void Optimizer::step() {
  if (kind_ == OptimizerKind::kSgd) {
    sgd_step(params_, lr_);
    return;
  }
  ++step_count_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    auto w = p.value.values();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double g = p.grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      w[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

void Optimizer::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

}  // namespace pdftemra::num
