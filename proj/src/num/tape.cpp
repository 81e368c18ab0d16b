// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/num/tape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "pdftemra/error.hpp"

namespace pdftemra::num {

namespace {

std::atomic<std::uint64_t> next_tape_id{1};
thread_local Tape* current_tape = nullptr;

}  // namespace

Parameter::Parameter(std::string name_, Tensor value_)
    : name(std::move(name_)), value(std::move(value_)), grad(value.size(), 0.0) {}

void Parameter::zero_grad() {
  grad.assign(value.size(), 0.0);
}

Tape::Tape() : id_(next_tape_id.fetch_add(1)) {}

Tape::~Tape() {
  if (current_tape == this) current_tape = nullptr;
}

Tape::Recording::Recording(Tape& tape) : previous_(current_tape) { current_tape = &tape; }

Tape::Recording::~Recording() { current_tape = previous_; }

Tape::Paused::Paused() : previous_(current_tape) { current_tape = nullptr; }

Tape::Paused::~Paused() { current_tape = previous_; }

Tape* Tape::active() noexcept { return current_tape; }

Tape* Tape::active_for(std::initializer_list<const Tensor*> operands) noexcept {
  Tape* tape = current_tape;
  if (tape == nullptr) return nullptr;
  for (const Tensor* t : operands) {
    if (t != nullptr && t->on(*tape)) return tape;
  }
  return nullptr;
}

Tensor Tape::tag(Tensor value, std::uint32_t index) const {
  value.tape_id_ = id_;
  value.node_ = index;
  return value;
}

Tensor Tape::watch(Parameter& param) {
  if (param.grad.size() != param.value.size()) param.zero_grad();
  Node node;
  node.size = param.value.size();
  node.param = &param;
  nodes_.push_back(std::move(node));
  return tag(param.value.detached(), static_cast<std::uint32_t>(nodes_.size() - 1));
}

Tape::Ref Tape::ref(const Tensor& t) const noexcept {
  if (!t.on(*this)) return std::nullopt;
  return t.node_;
}

Tensor Tape::push(Tensor value, BackwardFn fn) {
#ifndef NDEBUG
  for (double v : value.values()) {
    if (!std::isfinite(v)) throw NumericError("non-finite value produced by a recorded operation");
  }
#endif
  Node node;
  node.size = value.size();
  node.fn = std::move(fn);
  nodes_.push_back(std::move(node));
  return tag(std::move(value), static_cast<std::uint32_t>(nodes_.size() - 1));
}

std::span<double> Tape::grad(Ref ref) {
  if (!ref) return {};
  Node& node = nodes_.at(*ref);
  if (node.grad.empty()) node.grad.assign(node.size, 0.0);
  return node.grad;
}

void Tape::accumulate(Ref ref, std::span<const double> g) {
  if (!ref) return;
  auto dst = grad(ref);
  if (dst.size() != g.size()) throw DimensionError("gradient size mismatch on tape node");
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " + to_string(loss.shape()));
  }
  auto root = ref(loss);
  if (!root) throw ContractError("backward: loss is not recorded on this tape");
  grad(root)[0] = 1.0;
  for (std::size_t i = *root + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.grad.empty()) continue;
    if (node.param != nullptr) {
      auto& pg = node.param->grad;
      for (std::size_t k = 0; k < node.grad.size(); ++k) pg[k] += node.grad[k];
    } else if (node.fn) {
      // The callback may grow gradient buffers of earlier nodes but never
      // appends nodes, so `node` stays valid.
      node.fn(node.grad, *this);
    }
    std::vector<double>().swap(node.grad);
  }
  reset();
}

void Tape::reset() {
  nodes_.clear();
  id_ = next_tape_id.fetch_add(1);
}

Tensor use(Parameter& param) {
  if (Tape* tape = Tape::active()) return tape->watch(param);
  return param.value.detached();
}

}  // namespace pdftemra::num
