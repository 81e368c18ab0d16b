// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/num/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdftemra/error.hpp"
#include "pdftemra/num/kernels.hpp"

namespace pdftemra::num {

namespace {

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " + to_string(a.shape()) + " and " +
                         to_string(b.shape()) + " are not compatible");
  }
}

enum class Broadcast { kEqual, kLeftScalar, kRightScalar };

Broadcast classify(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::kEqual;
  if (a.size() == 1) return Broadcast::kLeftScalar;
  if (b.size() == 1) return Broadcast::kRightScalar;
  throw DimensionError(std::string(op) + ": shapes " + to_string(a.shape()) + " and " +
                       to_string(b.shape()) + " are not broadcast-compatible");
}

double total(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + to_string(a.shape()) + " by " + to_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out({m, n});
  kernels::gemm_nn(m, k, n, a.values().data(), b.values().data(), out.values().data());
  Tape* tape = Tape::active_for({&a, &b});
  if (tape == nullptr) return out;
  auto ra = tape->ref(a), rb = tape->ref(b);
  std::vector<double> av = rb ? a.storage() : std::vector<double>{};
  std::vector<double> bv = ra ? b.storage() : std::vector<double>{};
  return tape->push(std::move(out), [=, av = std::move(av), bv = std::move(bv)](std::span<const double> g, Tape& t) {
    if (ra) kernels::gemm_nt(m, n, k, g.data(), bv.data(), t.grad(ra).data());
    if (rb) kernels::gemm_tn(m, k, n, av.data(), g.data(), t.grad(rb).data());
  });
}

namespace {

Tensor linear_impl(const Tensor& x, const Tensor& w, const Tensor* b) {
  if (x.rank() < 1 || w.rank() != 2 || x.shape().back() != w.dim(0)) {
    throw DimensionError("linear: input " + to_string(x.shape()) + " does not match weight " + to_string(w.shape()));
  }
  const std::size_t in = w.dim(0), outd = w.dim(1);
  const std::size_t rows = x.size() / in;
  if (b != nullptr && (b->rank() != 1 || b->dim(0) != outd)) {
    throw DimensionError("linear: bias " + to_string(b->shape()) + " does not match weight " + to_string(w.shape()));
  }
  Shape shape = x.shape();
  shape.back() = outd;
  Tensor out(shape);
  auto ov = out.values();
  if (b != nullptr) {
    for (std::size_t r = 0; r < rows; ++r) std::copy(b->values().begin(), b->values().end(), ov.begin() + r * outd);
  }
  kernels::gemm_nn(rows, in, outd, x.values().data(), w.values().data(), ov.data());
  Tape* tape = Tape::active_for({&x, &w, b});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x), rw = tape->ref(w);
  Tape::Ref rb = b ? tape->ref(*b) : std::nullopt;
  std::vector<double> xv = rw ? x.storage() : std::vector<double>{};
  std::vector<double> wv = rx ? w.storage() : std::vector<double>{};
  return tape->push(std::move(out), [=, xv = std::move(xv), wv = std::move(wv)](std::span<const double> g, Tape& t) {
    if (rx) kernels::gemm_nt(rows, outd, in, g.data(), wv.data(), t.grad(rx).data());
    if (rw) kernels::gemm_tn(rows, in, outd, xv.data(), g.data(), t.grad(rw).data());
    if (rb) {
      auto gb = t.grad(rb);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < outd; ++j) gb[j] += g[r * outd + j];
      }
    }
  });
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& w) { return linear_impl(x, w, nullptr); }

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) { return linear_impl(x, w, &b); }

Tensor bmm(const Tensor& a, const Tensor& b) {
  if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(1)) {
    throw DimensionError("bmm: cannot multiply " + to_string(a.shape()) + " by " + to_string(b.shape()));
  }
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2), n = b.dim(2);
  Tensor out({batch, m, n});
  for (std::size_t i = 0; i < batch; ++i) {
    kernels::gemm_nn(m, k, n, a.values().data() + i * m * k, b.values().data() + i * k * n,
                     out.values().data() + i * m * n);
  }
  Tape* tape = Tape::active_for({&a, &b});
  if (tape == nullptr) return out;
  auto ra = tape->ref(a), rb = tape->ref(b);
  std::vector<double> av = rb ? a.storage() : std::vector<double>{};
  std::vector<double> bv = ra ? b.storage() : std::vector<double>{};
  return tape->push(std::move(out), [=, av = std::move(av), bv = std::move(bv)](std::span<const double> g, Tape& t) {
    auto ga = t.grad(ra);
    auto gb = t.grad(rb);
    for (std::size_t i = 0; i < batch; ++i) {
      const double* gi = g.data() + i * m * n;
      if (ra) kernels::gemm_nt(m, n, k, gi, bv.data() + i * k * n, ga.data() + i * m * k);
      if (rb) kernels::gemm_tn(m, k, n, av.data() + i * m * k, gi, gb.data() + i * k * n);
    }
  });
}

Tensor transpose_last2(const Tensor& x) {
  if (x.rank() < 2) throw DimensionError("transpose_last2 needs rank >= 2, got " + to_string(x.shape()));
  const std::size_t r = x.rank();
  const std::size_t m = x.dim(r - 2), n = x.dim(r - 1);
  const std::size_t batch = x.size() / (m * n);
  Shape shape = x.shape();
  std::swap(shape[r - 2], shape[r - 1]);
  Tensor out(shape);
  auto transpose = [=](const double* src, double* dst, bool accumulate) {
    for (std::size_t bi = 0; bi < batch; ++bi) {
      const double* s = src + bi * m * n;
      double* d = dst + bi * m * n;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (accumulate) {
            d[i * n + j] += s[j * m + i];
          } else {
            d[j * m + i] = s[i * n + j];
          }
        }
      }
    }
  };
  transpose(x.values().data(), out.values().data(), false);
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  return tape->push(std::move(out), [=](std::span<const double> g, Tape& t) {
    transpose(g.data(), t.grad(rx).data(), true);
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw DimensionError("reshape: cannot view " + to_string(x.shape()) + " as " + to_string(shape));
  }
  Tensor out(std::move(shape), x.storage());
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  return tape->push(std::move(out), [rx](std::span<const double> g, Tape& t) { t.accumulate(rx, g); });
}

namespace {

// Shared driver for add/sub/mul with scalar broadcasting.
template <class Op>
Tensor binary(const Tensor& a, const Tensor& b, const char* name, Op op) {
  const Broadcast mode = classify(a, b, name);
  const Tensor& big = mode == Broadcast::kLeftScalar ? b : a;
  Tensor out(big.shape());
  auto av = a.values(), bv = b.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) {
    const double x = mode == Broadcast::kLeftScalar ? av[0] : av[i];
    const double y = mode == Broadcast::kRightScalar ? bv[0] : bv[i];
    ov[i] = op.value(x, y);
  }
  Tape* tape = Tape::active_for({&a, &b});
  if (tape == nullptr) return out;
  auto ra = tape->ref(a), rb = tape->ref(b);
  std::vector<double> as = a.storage(), bs = b.storage();
  return tape->push(std::move(out), [=, as = std::move(as), bs = std::move(bs)](std::span<const double> g, Tape& t) {
    auto ga = t.grad(ra);
    auto gb = t.grad(rb);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t ia = mode == Broadcast::kLeftScalar ? 0 : i;
      const std::size_t ib = mode == Broadcast::kRightScalar ? 0 : i;
      if (ra) ga[ia] += g[i] * op.dx(as[ia], bs[ib]);
      if (rb) gb[ib] += g[i] * op.dy(as[ia], bs[ib]);
    }
  });
}

struct AddOp {
  double value(double x, double y) const { return x + y; }
  double dx(double, double) const { return 1.0; }
  double dy(double, double) const { return 1.0; }
};
struct SubOp {
  double value(double x, double y) const { return x - y; }
  double dx(double, double) const { return 1.0; }
  double dy(double, double) const { return -1.0; }
};
struct MulOp {
  double value(double x, double y) const { return x * y; }
  double dx(double, double y) const { return y; }
  double dy(double x, double) const { return x; }
};

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary(a, b, "add", AddOp{}); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(a, b, "sub", SubOp{}); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary(a, b, "mul", MulOp{}); }

Tensor scale(const Tensor& x, double factor) {
  return pointwise(x, [factor](double v) { return std::pair{v * factor, factor}; });
}

Tensor exp(const Tensor& x) {
  return pointwise(x, [](double v) {
    const double e = std::exp(v);
    return std::pair{e, e};
  });
}

Tensor log(const Tensor& x) {
  for (double v : x.values()) {
    if (!(v > 0.0)) throw DomainError("log of non-positive value " + std::to_string(v));
  }
  return pointwise(x, [](double v) { return std::pair{std::log(v), 1.0 / v}; });
}

Tensor tanh(const Tensor& x) {
  return pointwise(x, [](double v) {
    const double t = std::tanh(v);
    return std::pair{t, 1.0 - t * t};
  });
}

Tensor add_rowwise(const Tensor& x, const Tensor& b) {
  if (b.rank() != 1 || x.rank() < 1 || x.shape().back() != b.dim(0)) {
    throw DimensionError("add_rowwise: " + to_string(x.shape()) + " and " + to_string(b.shape()));
  }
  const std::size_t n = b.dim(0);
  Tensor out(x.shape(), x.storage());
  auto ov = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += bv[i % n];
  Tape* tape = Tape::active_for({&x, &b});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x), rb = tape->ref(b);
  return tape->push(std::move(out), [=](std::span<const double> g, Tape& t) {
    t.accumulate(rx, g);
    if (rb) {
      auto gb = t.grad(rb);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i % n] += g[i];
    }
  });
}

Tensor add_n(std::span<const Tensor> terms) {
  if (terms.empty()) throw ContractError("add_n needs at least one term");
  for (const auto& t : terms) require_same(terms[0], t, "add_n");
  Tensor out(terms[0].shape());
  auto ov = out.values();
  for (const auto& t : terms) {
    auto tv = t.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += tv[i];
  }
  Tape* tape = Tape::active();
  if (tape == nullptr) return out;
  std::vector<Tape::Ref> refs;
  bool any = false;
  for (const auto& t : terms) {
    refs.push_back(tape->ref(t));
    any = any || refs.back().has_value();
  }
  if (!any) return out;
  return tape->push(std::move(out), [refs = std::move(refs)](std::span<const double> g, Tape& t) {
    for (const auto& r : refs) t.accumulate(r, g);
  });
}

Tensor combine(std::span<const Tensor> terms, const Tensor& weights) {
  if (terms.empty()) throw ContractError("combine needs at least one term");
  if (weights.size() != terms.size()) {
    throw DimensionError("combine: " + std::to_string(terms.size()) + " terms but weights " +
                         to_string(weights.shape()));
  }
  for (const auto& t : terms) require_same(terms[0], t, "combine");
  Tensor out(terms[0].shape());
  auto ov = out.values();
  auto wv = weights.values();
  for (std::size_t j = 0; j < terms.size(); ++j) {
    auto tv = terms[j].values();
    const double w = wv[j];
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += w * tv[i];
  }
  Tape* tape = Tape::active();
  if (tape == nullptr) return out;
  std::vector<Tape::Ref> refs;
  bool any = false;
  for (const auto& t : terms) {
    refs.push_back(tape->ref(t));
    any = any || refs.back().has_value();
  }
  auto rw = tape->ref(weights);
  if (!any && !rw) return out;
  std::vector<std::vector<double>> saved;
  if (rw) {
    for (const auto& t : terms) saved.push_back(t.storage());
  }
  std::vector<double> w(wv.begin(), wv.end());
  return tape->push(std::move(out), [refs = std::move(refs), rw, saved = std::move(saved), w = std::move(w)](
                                        std::span<const double> g, Tape& t) {
    for (std::size_t j = 0; j < refs.size(); ++j) {
      if (!refs[j]) continue;
      auto gt = t.grad(refs[j]);
      for (std::size_t i = 0; i < g.size(); ++i) gt[i] += w[j] * g[i];
    }
    if (rw) {
      auto gw = t.grad(rw);
      for (std::size_t j = 0; j < saved.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * saved[j][i];
        gw[j] += s;
      }
    }
  });
}

Tensor mul_const(const Tensor& x, std::span<const double> factor) {
  if (factor.size() != x.size()) throw DimensionError("mul_const: factor size does not match " + to_string(x.shape()));
  Tensor out(x.shape());
  auto ov = out.values();
  auto xv = x.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = xv[i] * factor[i];
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  std::vector<double> f(factor.begin(), factor.end());
  return tape->push(std::move(out), [rx, f = std::move(f)](std::span<const double> g, Tape& t) {
    auto gx = t.grad(rx);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * f[i];
  });
}

Tensor sum(const Tensor& x) {
  Tensor out = Tensor::scalar(total(x.values()));
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  return tape->push(std::move(out), [rx](std::span<const double> g, Tape& t) {
    for (double& v : t.grad(rx)) v += g[0];
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

Tensor softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) throw DimensionError("softmax: axis out of range for " + to_string(x.shape()));
  const std::size_t n = x.dim(axis);
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
  const std::size_t outer = x.size() / (n * inner);
  Tensor out(x.shape());
  auto xv = x.values();
  auto yv = out.values();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) mx = std::max(mx, xv[base + k * inner]);
      double z = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double e = std::exp(xv[base + k * inner] - mx);
        yv[base + k * inner] = e;
        z += e;
      }
      for (std::size_t k = 0; k < n; ++k) yv[base + k * inner] /= z;
    }
  }
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  std::vector<double> y = out.storage();
  return tape->push(std::move(out), [=, y = std::move(y)](std::span<const double> g, Tape& t) {
    auto gx = t.grad(rx);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        const std::size_t base = o * n * inner + in;
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += g[base + k * inner] * y[base + k * inner];
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t i = base + k * inner;
          gx[i] += y[i] * (g[i] - dot);
        }
      }
    }
  });
}

Tensor masked_softmax(const Tensor& x, std::span<const std::uint8_t> mask) {
  if (x.rank() < 1 || mask.empty() || x.size() % mask.size() != 0 || mask.size() % x.shape().back() != 0) {
    throw DimensionError("masked_softmax: mask of size " + std::to_string(mask.size()) + " does not tile " +
                         to_string(x.shape()));
  }
  const std::size_t n = x.shape().back();
  const std::size_t rows = x.size() / n;
  Tensor out(x.shape());
  auto xv = x.values();
  auto yv = out.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * n;
    const std::uint8_t* m = mask.data() + (base % mask.size());
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (!m[k]) {
        mx = std::max(mx, xv[base + k]);
        any = true;
      }
    }
    if (!any) throw ContractError("masked_softmax: row with every entry masked");
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = m[k] ? 0.0 : std::exp(xv[base + k] - mx);
      yv[base + k] = e;
      z += e;
    }
    for (std::size_t k = 0; k < n; ++k) yv[base + k] /= z;
  }
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  std::vector<double> y = out.storage();
  return tape->push(std::move(out), [=, y = std::move(y)](std::span<const double> g, Tape& t) {
    auto gx = t.grad(rx);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t base = r * n;
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += g[base + k] * y[base + k];
      for (std::size_t k = 0; k < n; ++k) gx[base + k] += y[base + k] * (g[base + k] - dot);
    }
  });
}

Tensor log_softmax(const Tensor& x) {
  if (x.rank() < 1) throw DimensionError("log_softmax needs rank >= 1");
  const std::size_t n = x.shape().back();
  const std::size_t rows = x.size() / n;
  Tensor out(x.shape());
  auto xv = x.values();
  auto yv = out.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = xv.data() + r * n;
    const double mx = *std::max_element(xr, xr + n);
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k) z += std::exp(xr[k] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t k = 0; k < n; ++k) yv[r * n + k] = xr[k] - lse;
  }
  Tape* tape = Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  std::vector<double> y = out.storage();
  return tape->push(std::move(out), [=, y = std::move(y)](std::span<const double> g, Tape& t) {
    auto gx = t.grad(rx);
    for (std::size_t r = 0; r < rows; ++r) {
      double gs = 0.0;
      for (std::size_t k = 0; k < n; ++k) gs += g[r * n + k];
      for (std::size_t k = 0; k < n; ++k) gx[r * n + k] += g[r * n + k] - std::exp(y[r * n + k]) * gs;
    }
  });
}

Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids, Shape prefix) {
  if (table.rank() != 2) throw DimensionError("gather_rows: table must be 2-D, got " + to_string(table.shape()));
  if (numel(prefix) != ids.size()) {
    throw DimensionError("gather_rows: " + std::to_string(ids.size()) + " ids for prefix " + to_string(prefix));
  }
  const std::size_t rows = table.dim(0), d = table.dim(1);
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= rows) {
      throw IndexError("id " + std::to_string(id) + " outside table of " + std::to_string(rows) + " rows");
    }
  }
  prefix.push_back(d);
  Tensor out(std::move(prefix));
  auto ov = out.values();
  auto tv = table.values();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::copy_n(tv.begin() + static_cast<std::ptrdiff_t>(ids[i] * d), d, ov.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  Tape* tape = Tape::active_for({&table});
  if (tape == nullptr) return out;
  auto rt = tape->ref(table);
  std::vector<std::int32_t> idv(ids.begin(), ids.end());
  return tape->push(std::move(out), [rt, d, idv = std::move(idv)](std::span<const double> g, Tape& t) {
    auto gt = t.grad(rt);
    for (std::size_t i = 0; i < idv.size(); ++i) {
      double* row = gt.data() + static_cast<std::size_t>(idv[i]) * d;
      for (std::size_t k = 0; k < d; ++k) row[k] += g[i * d + k];
    }
  });
}

}  // namespace pdftemra::num
