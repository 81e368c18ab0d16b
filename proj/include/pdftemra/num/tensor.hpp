// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pdftemra::num {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string to_string(const Shape& shape);

class Tape;

/// Dense row-major array of doubles. A tensor produced by an operation while a
/// tape is recording carries a reference to its tape node; all others are
/// constants as far as differentiation is concerned.
class Tensor {
 public:
  Tensor() = default;
  /// Zero-filled tensor.
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double value);
  static Tensor vector(std::initializer_list<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor full(Shape shape, double value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> values() const noexcept { return values_; }
  /// Mutable access. Editing a tensor that is already on a tape does not
  /// update the recorded forward values.
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& storage() const noexcept { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(std::initializer_list<std::size_t> index) const;
  /// Value of a single-element tensor.
  double item() const;

  /// Same values, no tape node.
  Tensor detached() const;
  /// True when the tensor references a node of the currently live tape `tape`.
  bool on(const Tape& tape) const noexcept;

 private:
  friend class Tape;

  Shape shape_;
  std::vector<double> values_;
  std::uint64_t tape_id_ = 0;
  std::uint32_t node_ = 0;
};

}  // namespace pdftemra::num
