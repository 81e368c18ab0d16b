// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdftemra/layers/activation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "pdftemra/error.hpp"
#include "pdftemra/num/ops.hpp"

namespace pdftemra::layers {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ELU family: alpha * (exp(x) - 1) for x <= 0.
std::pair<double, double> elu(double x, double alpha) {
  if (x > 0.0) return {x, 1.0};
  const double e = std::exp(x);
  return {alpha * std::expm1(x), alpha * e};
}

}  // namespace

std::string_view name(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::kElu: return "ELU";
    case ActivationKind::kLeakyRelu: return "LeakyReLU";
    case ActivationKind::kPrelu: return "PReLU";
    case ActivationKind::kRelu: return "ReLU";
    case ActivationKind::kSelu: return "SELU";
    case ActivationKind::kCelu: return "CELU";
    case ActivationKind::kMish: return "Mish";
    case ActivationKind::kTanh: return "Tanh";
    case ActivationKind::kSilu: return "SiLU";
    case ActivationKind::kGelu: return "GELU";
  }
  return "?";
}

ActivationKind parse_activation(std::string_view text) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const std::string want = lower(text);
  for (auto kind : kActivationPool) {
    if (lower(name(kind)) == want) return kind;
  }
  throw ConfigError("unknown activation '" + std::string(text) + "'");
}

std::size_t pool_index(ActivationKind kind) noexcept { return static_cast<std::size_t>(kind); }

namespace {

template <ActivationKind K>
std::pair<double, double> eval_kind(double x, double alpha) {
  if constexpr (K == ActivationKind::kElu) {
    return elu(x, kEluAlpha);
  } else if constexpr (K == ActivationKind::kLeakyRelu) {
    return x > 0.0 ? std::pair{x, 1.0} : std::pair{kLeakySlope * x, kLeakySlope};
  } else if constexpr (K == ActivationKind::kPrelu) {
    return x > 0.0 ? std::pair{x, 1.0} : std::pair{alpha * x, alpha};
  } else if constexpr (K == ActivationKind::kRelu) {
    return x > 0.0 ? std::pair{x, 1.0} : std::pair{0.0, 0.0};
  } else if constexpr (K == ActivationKind::kSelu) {
    auto [v, d] = elu(x, kSeluAlpha);
    return {kSeluLambda * v, kSeluLambda * d};
  } else if constexpr (K == ActivationKind::kCelu) {
    if (x > 0.0) return {x, 1.0};
    return {kCeluAlpha * std::expm1(x / kCeluAlpha), std::exp(x / kCeluAlpha)};
  } else if constexpr (K == ActivationKind::kMish) {
    // tanh(softplus(x)) = n / (n + 2) with n = e^x (e^x + 2).
    if (x > 20.0) return {x, 1.0};
    const double e = std::exp(x);
    const double n = e * (e + 2.0);
    const double t = n / (n + 2.0);
    return {x * t, t + x * (1.0 - t * t) * (e / (1.0 + e))};
  } else if constexpr (K == ActivationKind::kTanh) {
    const double t = std::tanh(x);
    return {t, 1.0 - t * t};
  } else if constexpr (K == ActivationKind::kSilu) {
    const double s = sigmoid(x);
    return {x * s, s * (1.0 + x * (1.0 - s))};
  } else {
    const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return {x * cdf, cdf + x * pdf};
  }
}

template <ActivationKind K>
num::Tensor apply_kind(const num::Tensor& x) {
  return num::pointwise(x, [](double v) { return eval_kind<K>(v, 0.0); });
}

}  // namespace

std::pair<double, double> activation_eval(ActivationKind kind, double x, double alpha) {
  switch (kind) {
    case ActivationKind::kElu: return eval_kind<ActivationKind::kElu>(x, alpha);
    case ActivationKind::kLeakyRelu: return eval_kind<ActivationKind::kLeakyRelu>(x, alpha);
    case ActivationKind::kPrelu: return eval_kind<ActivationKind::kPrelu>(x, alpha);
    case ActivationKind::kRelu: return eval_kind<ActivationKind::kRelu>(x, alpha);
    case ActivationKind::kSelu: return eval_kind<ActivationKind::kSelu>(x, alpha);
    case ActivationKind::kCelu: return eval_kind<ActivationKind::kCelu>(x, alpha);
    case ActivationKind::kMish: return eval_kind<ActivationKind::kMish>(x, alpha);
    case ActivationKind::kTanh: return eval_kind<ActivationKind::kTanh>(x, alpha);
    case ActivationKind::kSilu: return eval_kind<ActivationKind::kSilu>(x, alpha);
    case ActivationKind::kGelu: return eval_kind<ActivationKind::kGelu>(x, alpha);
  }
  return {0.0, 0.0};
}

num::Tensor activate(ActivationKind kind, const num::Tensor& x, const num::Tensor& alpha) {
  switch (kind) {
    case ActivationKind::kElu: return apply_kind<ActivationKind::kElu>(x);
    case ActivationKind::kLeakyRelu: return apply_kind<ActivationKind::kLeakyRelu>(x);
    case ActivationKind::kRelu: return apply_kind<ActivationKind::kRelu>(x);
    case ActivationKind::kSelu: return apply_kind<ActivationKind::kSelu>(x);
    case ActivationKind::kCelu: return apply_kind<ActivationKind::kCelu>(x);
    case ActivationKind::kMish: return apply_kind<ActivationKind::kMish>(x);
    case ActivationKind::kTanh: return apply_kind<ActivationKind::kTanh>(x);
    case ActivationKind::kSilu: return apply_kind<ActivationKind::kSilu>(x);
    case ActivationKind::kGelu: return apply_kind<ActivationKind::kGelu>(x);
    case ActivationKind::kPrelu: break;
  }
  if (alpha.size() != 1) throw ContractError("PReLU needs a single learnable slope");
  const double a = alpha[0];
  num::Tensor out(x.shape());
  auto in = x.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) ov[i] = in[i] > 0.0 ? in[i] : a * in[i];
  num::Tape* tape = num::Tape::active_for({&x, &alpha});
  if (tape == nullptr) return out;
  auto rx = tape->ref(x), ra = tape->ref(alpha);
  std::vector<double> xv = x.storage();
  return tape->push(std::move(out), [rx, ra, a, xv = std::move(xv)](std::span<const double> g, num::Tape& t) {
    if (rx) {
      auto gx = t.grad(rx);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (xv[i] > 0.0 ? 1.0 : a);
    }
    if (ra) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (xv[i] <= 0.0) s += g[i] * xv[i];
      }
      t.grad(ra)[0] += s;
    }
  });
}

ActivationEnsemble::ActivationEnsemble(std::vector<ActivationKind> members, const std::string& prefix)
    : members_(std::move(members)) {
  if (members_.empty()) throw ConfigError("activation ensemble needs at least one member");
  mix_logits_ = num::Parameter(prefix + ".mix_logits", num::Tensor({members_.size()}));
  if (std::find(members_.begin(), members_.end(), ActivationKind::kPrelu) != members_.end()) {
    prelu_alpha_ = num::Parameter(prefix + ".prelu_alpha", num::Tensor::scalar(kPreluInit));
  }
}

num::Tensor ActivationEnsemble::operator()(const num::Tensor& x) {
  std::array<num::Tensor, 10> shared;
  for (auto kind : members_) {
    if (kind != ActivationKind::kPrelu) shared[pool_index(kind)] = activate(kind, x);
  }
  return mix(x, shared);
}

num::Tensor ActivationEnsemble::mix(const num::Tensor& x, const std::array<num::Tensor, 10>& shared) {
  std::vector<num::Tensor> terms;
  terms.reserve(members_.size());
  for (auto kind : members_) {
    if (kind == ActivationKind::kPrelu) {
      terms.push_back(activate(kind, x, num::use(prelu_alpha_)));
    } else {
      const num::Tensor& t = shared[pool_index(kind)];
      if (t.shape() != x.shape()) throw ContractError("ensemble: missing shared output for " + std::string(name(kind)));
      terms.push_back(t);
    }
  }
  return num::combine(terms, num::softmax(num::use(mix_logits_), 0));
}

std::vector<double> ActivationEnsemble::weights() const { return num::softmax(mix_logits_.value, 0).storage(); }

std::vector<num::Parameter*> ActivationEnsemble::parameters() {
  std::vector<num::Parameter*> out{&mix_logits_};
  if (has_prelu()) out.push_back(&prelu_alpha_);
  return out;
}

std::vector<std::vector<ActivationKind>> sample_ensembles(num::Rng& rng, std::size_t n_heads, std::size_t pool_k) {
  if (pool_k < 1 || pool_k > kActivationPool.size()) {
    throw ConfigError("ensemble pool size must be in [1, 10], got " + std::to_string(pool_k));
  }
  std::vector<std::vector<ActivationKind>> out;
  out.reserve(n_heads);
  for (std::size_t h = 0; h < n_heads; ++h) {
    std::array<ActivationKind, 10> pool = kActivationPool;
    rng.shuffle(std::span<ActivationKind>(pool));
    out.emplace_back(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(pool_k));
  }
  return out;
}

}  // namespace pdftemra::layers
