// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/layers/linear.hpp"

#include <cmath>

#include "pdftemra/error.hpp"
#include "pdftemra/num/ops.hpp"

namespace pdftemra::layers {

namespace {

num::Tensor uniform(num::Shape shape, double bound, num::Rng& rng) {
  num::Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

num::Parameter prelu_slope(ActivationKind act, const std::string& prefix) {
  if (act != ActivationKind::kPrelu) return {};
  return num::Parameter(prefix + ".prelu_alpha", num::Tensor::scalar(kPreluInit));
}

num::Tensor apply(ActivationKind act, const num::Tensor& x, num::Parameter& alpha) {
  if (act == ActivationKind::kPrelu) return activate(act, x, num::use(alpha));
  return activate(act, x);
}

}  // namespace

Linear::Linear(std::size_t in, std::size_t out, bool bias, num::Rng& rng, const std::string& prefix) {
  if (in == 0 || out == 0) throw ConfigError("linear layer extents must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = num::Parameter(prefix + ".weight", uniform({in, out}, bound, rng));
  if (bias) bias_ = num::Parameter(prefix + ".bias", uniform({out}, bound, rng));
}

num::Tensor Linear::operator()(const num::Tensor& x) {
  if (bias_.size() == 0) return num::linear(x, num::use(weight_));
  return num::linear(x, num::use(weight_), num::use(bias_));
}

std::vector<num::Parameter*> Linear::parameters() {
  if (bias_.size() == 0) return {&weight_};
  return {&weight_, &bias_};
}

FeedForward::FeedForward(std::size_t dim, std::size_t hidden, num::Rng& rng, const std::string& prefix)
    : in_(dim, hidden, true, rng, prefix + ".in"), out_(hidden, dim, true, rng, prefix + ".out") {}

num::Tensor FeedForward::operator()(const num::Tensor& x) {
  return out_(activate(ActivationKind::kGelu, in_(x)));
}

std::vector<num::Parameter*> FeedForward::parameters() {
  auto p = in_.parameters();
  for (auto* q : out_.parameters()) p.push_back(q);
  return p;
}

Adapter::Adapter(std::size_t dim, std::size_t rank, ActivationKind act, num::Rng& rng, const std::string& prefix)
    : act_(act) {
  if (rank == 0 || rank >= dim) {
    throw ConfigError("adapter rank must satisfy 0 < r < d, got r=" + std::to_string(rank) +
                      " d=" + std::to_string(dim));
  }
  down_ = num::Parameter(prefix + ".down", uniform({dim, rank}, 1.0 / std::sqrt(static_cast<double>(dim)), rng));
  up_ = num::Parameter(prefix + ".up", num::Tensor({rank, dim}));
  prelu_alpha_ = prelu_slope(act, prefix);
}

num::Tensor Adapter::operator()(const num::Tensor& x) {
  num::Tensor h = apply(act_, num::linear(x, num::use(down_)), prelu_alpha_);
  return num::add(x, num::linear(h, num::use(up_)));
}

std::vector<num::Parameter*> Adapter::parameters() {
  std::vector<num::Parameter*> p{&down_, &up_};
  if (prelu_alpha_.size() != 0) p.push_back(&prelu_alpha_);
  return p;
}

ModulatedLinear::ModulatedLinear(std::size_t in, std::size_t out, std::size_t theta_dim, std::size_t hidden,
                                 ActivationKind act, num::Rng& rng, const std::string& prefix)
    : in_(in),
      out_(out),
      act_(act),
      weight_hidden_(theta_dim, hidden, true, rng, prefix + ".weight_gen.hidden"),
      weight_output_(hidden, in * out, true, rng, prefix + ".weight_gen.output"),
      bias_hidden_(theta_dim, hidden, true, rng, prefix + ".bias_gen.hidden"),
      bias_output_(hidden, out, true, rng, prefix + ".bias_gen.output"),
      prelu_alpha_(prelu_slope(act, prefix)) {
  for (Linear* l : {&weight_output_, &bias_output_}) {
    for (auto* p : l->parameters()) std::fill(p->value.values().begin(), p->value.values().end(), 0.0);
  }
}

num::Tensor ModulatedLinear::operator()(const num::Tensor& x, const num::Tensor& theta) {
  if (theta.rank() != 1 || theta.size() != theta_dim()) {
    throw DimensionError("modulated linear expects theta of shape [" + std::to_string(theta_dim()) + "], got " +
                         num::to_string(theta.shape()));
  }
  if (x.rank() < 1 || x.shape().back() != in_) {
    throw DimensionError("modulated linear expects input width " + std::to_string(in_) + ", got " +
                         num::to_string(x.shape()));
  }
  num::Tensor t = num::reshape(theta, {1, theta.size()});
  num::Tensor w = num::reshape(weight_output_(num::tanh(weight_hidden_(t))), {in_, out_});
  num::Tensor b = num::reshape(bias_output_(num::tanh(bias_hidden_(t))), {out_});
  return apply(act_, num::linear(x, w, b), prelu_alpha_);
}

std::vector<num::Parameter*> ModulatedLinear::parameters() {
  std::vector<num::Parameter*> p;
  for (Linear* l : {&weight_hidden_, &weight_output_, &bias_hidden_, &bias_output_}) {
    for (auto* q : l->parameters()) p.push_back(q);
  }
  if (prelu_alpha_.size() != 0) p.push_back(&prelu_alpha_);
  return p;
}

num::Tensor dropout(const num::Tensor& x, double rate, num::Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) return x;
  std::vector<double> mask(x.size());
  const double keep = 1.0 / (1.0 - rate);
  for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep;
  return num::mul_const(x, mask);
}

}  // namespace pdftemra::layers
