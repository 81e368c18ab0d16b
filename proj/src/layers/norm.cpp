// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/layers/norm.hpp"

#include <cmath>

#include "pdftemra/error.hpp"

namespace pdftemra::layers {

namespace {

thread_local AdaNormFactorScope* current_scope = nullptr;

struct Normalized {
  std::vector<double> z;
  std::vector<double> inv_sigma;  // one per row
  std::size_t width = 0;
};

Normalized normalize(const num::Tensor& x, double eps) {
  if (x.rank() < 1) throw DimensionError("normalization needs at least one axis");
  Normalized n;
  n.width = x.shape().back();
  const std::size_t rows = x.size() / n.width;
  n.z.resize(x.size());
  n.inv_sigma.resize(rows);
  auto v = x.values();
  const double c = static_cast<double>(n.width);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = v.data() + r * n.width;
    double mu = 0.0;
    for (std::size_t i = 0; i < n.width; ++i) mu += row[i];
    mu /= c;
    double var = 0.0;
    for (std::size_t i = 0; i < n.width; ++i) var += (row[i] - mu) * (row[i] - mu);
    var /= c;
    const double inv = 1.0 / std::sqrt(var + eps);
    n.inv_sigma[r] = inv;
    for (std::size_t i = 0; i < n.width; ++i) n.z[r * n.width + i] = (row[i] - mu) * inv;
  }
  return n;
}

// gx += (gz - mean(gz) - z * mean(gz * z)) / sigma, row by row.
void normalize_backward(const Normalized& n, const std::vector<double>& gz, std::span<double> gx) {
  const std::size_t w = n.width;
  const double c = static_cast<double>(w);
  for (std::size_t r = 0; r < n.inv_sigma.size(); ++r) {
    const double* z = n.z.data() + r * w;
    const double* g = gz.data() + r * w;
    double mg = 0.0, mgz = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
      mg += g[i];
      mgz += g[i] * z[i];
    }
    mg /= c;
    mgz /= c;
    for (std::size_t i = 0; i < w; ++i) gx[r * w + i] += (g[i] - mg - z[i] * mgz) * n.inv_sigma[r];
  }
}

}  // namespace

std::vector<double> normalize_rows(const num::Tensor& x, double eps) { return normalize(x, eps).z; }

AdaNorm::AdaNorm(double scale, double eps) : scale_(scale), eps_(eps) {
  if (!(scale > 0.0)) throw ConfigError("AdaNorm scale K must be positive");
  if (!(eps > 0.0)) throw ConfigError("AdaNorm eps must be positive");
}

num::Tensor AdaNorm::operator()(const num::Tensor& x) const {
  auto n = normalize(x, eps_);
  std::vector<double> factor = AdaNormFactorScope::factor(n.z);
  const double k = scale_;
  num::Tensor out(x.shape());
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = k * factor[i] * n.z[i];
  num::Tape* tape = num::Tape::active_for({&x});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x);
  return tape->push(std::move(out), [rx, k, n = std::move(n), factor = std::move(factor)](
                                        std::span<const double> g, num::Tape& t) {
    std::vector<double> gz(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) gz[i] = k * factor[i] * g[i];
    normalize_backward(n, gz, t.grad(rx));
  });
}

AdaNormFactorScope::AdaNormFactorScope(std::vector<std::vector<double>>& store, Mode mode)
    : store_(&store), mode_(mode), previous_(current_scope) {
  if (mode_ == Mode::kRecord) store_->clear();
  current_scope = this;
}

AdaNormFactorScope::~AdaNormFactorScope() { current_scope = previous_; }

std::vector<double> AdaNormFactorScope::factor(const std::vector<double>& z) {
  AdaNormFactorScope* scope = current_scope;
  if (scope != nullptr && scope->mode_ == Mode::kReplay) {
    if (scope->next_ >= scope->store_->size()) throw ContractError("AdaNorm replay ran past the recorded factors");
    const auto& f = (*scope->store_)[scope->next_++];
    if (f.size() != z.size()) throw ContractError("AdaNorm replay: recorded factor has a different size");
    return f;
  }
  std::vector<double> f(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) f[i] = 1.0 - AdaNorm::kCoeff * z[i];
  if (scope != nullptr) scope->store_->push_back(f);
  return f;
}

LayerNorm::LayerNorm(std::size_t dim, const std::string& prefix)
    : gain_(prefix + ".gain", num::Tensor::full({dim}, 1.0)), bias_(prefix + ".bias", num::Tensor({dim})) {}

num::Tensor LayerNorm::operator()(const num::Tensor& x) {
  if (x.rank() < 1 || x.shape().back() != gain_.size()) {
    throw DimensionError("layer norm of width " + std::to_string(gain_.size()) + " applied to " +
                         num::to_string(x.shape()));
  }
  num::Tensor gain = num::use(gain_), bias = num::use(bias_);
  auto n = normalize(x, kEps);
  const std::size_t w = n.width;
  num::Tensor out(x.shape());
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = gain[i % w] * n.z[i] + bias[i % w];
  num::Tape* tape = num::Tape::active_for({&x, &gain, &bias});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x), rg = tape->ref(gain), rb = tape->ref(bias);
  std::vector<double> gv = gain.storage();
  return tape->push(std::move(out), [=, n = std::move(n), gv = std::move(gv)](std::span<const double> g,
                                                                              num::Tape& t) {
    if (rg || rb) {
      auto gg = t.grad(rg);
      auto gb = t.grad(rb);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (rg) gg[i % w] += g[i] * n.z[i];
        if (rb) gb[i % w] += g[i];
      }
    }
    if (rx) {
      std::vector<double> gz(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) gz[i] = gv[i % w] * g[i];
      normalize_backward(n, gz, t.grad(rx));
    }
  });
}

}  // namespace pdftemra::layers
