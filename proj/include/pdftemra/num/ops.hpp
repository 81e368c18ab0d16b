// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pdftemra/num/tape.hpp"
#include "pdftemra/num/tensor.hpp"

// Differentiable primitives. Every function records a backward rule on the
// active tape when at least one operand is tracked; otherwise it is a plain
// value computation. Broadcasting is limited to equal shapes and
// single-element-vs-tensor.

namespace pdftemra::num {

/// [m,k] x [k,n] -> [m,n].
Tensor matmul(const Tensor& a, const Tensor& b);
/// x[..., in] . w[in, out] -> [..., out].
Tensor linear(const Tensor& x, const Tensor& w);
/// x[..., in] . w[in, out] + b[out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
/// Batched [B,m,k] x [B,k,n] -> [B,m,n].
Tensor bmm(const Tensor& a, const Tensor& b);
/// Swaps the two trailing axes.
Tensor transpose_last2(const Tensor& x);
Tensor reshape(const Tensor& x, Shape shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor exp(const Tensor& x);
/// Throws DomainError on non-positive input.
Tensor log(const Tensor& x);
Tensor tanh(const Tensor& x);
/// x[..., n] + b[n].
Tensor add_rowwise(const Tensor& x, const Tensor& b);
/// Sum of equally shaped tensors.
Tensor add_n(std::span<const Tensor> terms);
/// Sum_j weights[j] * terms[j]; weights has one element per term.
Tensor combine(std::span<const Tensor> terms, const Tensor& weights);
/// Elementwise product with a constant (non-differentiable) factor.
Tensor mul_const(const Tensor& x, std::span<const double> factor);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

/// Softmax along `axis` (max-subtracted).
Tensor softmax(const Tensor& x, std::size_t axis);
/// Softmax along the last axis where entries with mask != 0 act as -inf:
/// they come out as exactly 0 and receive no gradient. `mask` covers one
/// trailing [.., n] block and is reused for every leading index, so its size
/// must divide x.size(). Every row needs at least one unmasked entry.
Tensor masked_softmax(const Tensor& x, std::span<const std::uint8_t> mask);
/// Log-softmax along the last axis.
Tensor log_softmax(const Tensor& x);

/// Rows of table[V, d] selected by ids; result shape is prefix + [d].
Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids, Shape prefix);

/// Elementwise map. `f(x)` returns {value, derivative}.
template <class F>
Tensor pointwise(const Tensor& x, F&& f) {
  Tensor out(x.shape());
  auto in = x.values();
  auto ov = out.values();
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) {
    for (std::size_t i = 0; i < in.size(); ++i) ov[i] = f(in[i]).first;
    return out;
  }
  std::vector<double> deriv(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto [v, d] = f(in[i]);
    ov[i] = v;
    deriv[i] = d;
  }
  auto rx = tape->ref(x);
  return tape->push(std::move(out), [rx, deriv = std::move(deriv)](std::span<const double> g, Tape& t) {
    auto gx = t.grad(rx);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * deriv[i];
  });
}

}  // namespace pdftemra::num
