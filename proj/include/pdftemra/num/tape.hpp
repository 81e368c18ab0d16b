// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdftemra/num/tensor.hpp"

namespace pdftemra::num {

/// A learnable tensor together with its accumulated gradient.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value);

  std::string name;
  Tensor value;
  std::vector<double> grad;

  void zero_grad();
  std::size_t size() const noexcept { return value.size(); }
};

/// Reverse-mode recording tape.
///
/// Nodes are appended in execution order, so node ids are topologically
/// sorted. `backward` walks them once in reverse, accumulating gradients into
/// the watched parameters, and then resets the tape. Only one tape may record
/// on a thread at a time; it is made current by a `Recording` guard.
class Tape {
 public:
  /// Index of an operand node, or nothing when the operand is a constant.
  using Ref = std::optional<std::uint32_t>;
  /// Called with the node's upstream gradient; propagates into operand refs.
  using BackwardFn = std::function<void(std::span<const double> grad, Tape& tape)>;

  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// RAII guard making a tape the recording target of the current thread.
  class Recording {
   public:
    explicit Recording(Tape& tape);
    ~Recording();
    Recording(const Recording&) = delete;
    Recording& operator=(const Recording&) = delete;

   private:
    Tape* previous_;
  };

  /// RAII guard that suspends recording on the current thread.
  class Paused {
   public:
    Paused();
    ~Paused();
    Paused(const Paused&) = delete;
    Paused& operator=(const Paused&) = delete;

   private:
    Tape* previous_;
  };

  /// Tape recording on this thread, if any.
  static Tape* active() noexcept;
  /// The active tape if at least one operand lives on it, else nullptr.
  static Tape* active_for(std::initializer_list<const Tensor*> operands) noexcept;

  /// Leaf node bound to `param`; its gradient lands in `param.grad`.
  Tensor watch(Parameter& param);
  Ref ref(const Tensor& t) const noexcept;
  /// Appends an operation node owning `value` and returns it tagged.
  Tensor push(Tensor value, BackwardFn fn);
  /// Gradient buffer of an operand node (allocated on first use), or an empty
  /// span for constants.
  std::span<double> grad(Ref ref);
  void accumulate(Ref ref, std::span<const double> g);

  /// Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be a single-element
  /// tensor recorded on this tape. The tape is reset afterwards.
  void backward(const Tensor& loss);
  void reset();

  std::size_t size() const noexcept { return nodes_.size(); }
  std::uint64_t id() const noexcept { return id_; }

 private:
  struct Node {
    std::size_t size = 0;
    std::vector<double> grad;
    BackwardFn fn;
    Parameter* param = nullptr;
  };

  Tensor tag(Tensor value, std::uint32_t index) const;

  std::uint64_t id_;
  std::vector<Node> nodes_;
};

/// Parameter value as an operand: watched on the active tape when recording,
/// otherwise a plain copy.
Tensor use(Parameter& param);

}  // namespace pdftemra::num
