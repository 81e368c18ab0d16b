// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gradcheck.hpp"
#include "pdftemra/error.hpp"
#include "pdftemra/num/ops.hpp"
#include "pdftemra/num/optim.hpp"
#include "pdftemra/num/rng.hpp"
#include "pdftemra/num/tape.hpp"

namespace pdftemra::num {
namespace {

using testing::gradcheck;
using testing::random_like;
using testing::weighted_sum;

Shape random_shape(Rng& rng, std::size_t rank) {
  Shape s;
  for (std::size_t i = 0; i < rank; ++i) s.push_back(1 + rng.below(8));
  return s;
}

TEST(Tensor, ShapeAndDataAgree) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), DimensionError);
  EXPECT_THROW(Tensor({0, 2}), DimensionError);
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  auto eye = Tensor::matrix({{1, 0}, {0, 1}});
  auto m = Tensor::matrix({{1, 2}, {3, 4}});
  EXPECT_EQ(matmul(eye, m).storage(), m.storage());
}

TEST(Matmul, RowTimesColumn) {
  auto c = matmul(Tensor::matrix({{1, 2}}), Tensor::matrix({{3}, {4}}));
  EXPECT_EQ(c.shape(), (Shape{1, 1}));
  EXPECT_DOUBLE_EQ(c.item(), 11.0);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  try {
    matmul(Tensor({2, 3}), Tensor({2, 3}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2,3]"), std::string::npos);
    EXPECT_NE(msg.find("by [2,3]"), std::string::npos);
  }
}

TEST(Matmul, GradientOfSumMatchesFiniteDifferences) {
  Rng rng(3);
  Parameter a("a", random_like({3, 4}, rng)), b("b", random_like({4, 2}, rng));
  auto r = gradcheck({&a, &b}, [&] { return sum(matmul(use(a), use(b))); });
  EXPECT_LT(r.rel_error, 1e-6);
}

TEST(Elementwise, Examples) {
  EXPECT_EQ(add(Tensor::vector({1, 2}), Tensor::vector({3, 4})).storage(), (std::vector<double>{4, 6}));
  EXPECT_EQ(exp(Tensor::vector({0})).item(), 1.0);
  EXPECT_EQ(mul(Tensor::scalar(2), Tensor::vector({1, 3})).storage(), (std::vector<double>{2, 6}));
}

TEST(Elementwise, LogExpRoundTrip) {
  Tensor x({1001});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = -5.0 + 10.0 * static_cast<double>(i) / 1000.0;
  auto back = log(exp(x));
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(back[i] - x[i]));
  EXPECT_LT(worst, 1e-12);
}

TEST(Elementwise, Errors) {
  EXPECT_THROW(log(Tensor::vector({1.0, 0.0})), DomainError);
  EXPECT_THROW(log(Tensor::vector({-1.0})), DomainError);
  EXPECT_THROW(add(Tensor({2}), Tensor({3})), DimensionError);
  EXPECT_THROW(mul(Tensor({2, 2}), Tensor({4})), DimensionError);
}

TEST(Softmax, Examples) {
  auto half = softmax(Tensor::vector({0, 0}), 0);
  EXPECT_DOUBLE_EQ(half[0], 0.5);
  EXPECT_DOUBLE_EQ(half[1], 0.5);
  auto third = softmax(Tensor::vector({1000, 1000, 1000}), 0);
  for (double v : third.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Softmax, RowsSumToOneOnAnyAxis) {
  Rng rng(11);
  auto x = random_like({3, 4, 5}, rng, -30, 30);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    auto y = softmax(x, axis);
    const std::size_t n = x.dim(axis);
    std::size_t inner = 1;
    for (std::size_t i = axis + 1; i < 3; ++i) inner *= x.dim(i);
    for (std::size_t o = 0; o < x.size() / (n * inner); ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double v = y[o * n * inner + k * inner + in];
          EXPECT_GE(v, 0.0);
          s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(Softmax, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  Parameter x("x", random_like({3, 5}, rng, -2, 2));
  auto w = random_like({3, 5}, rng);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    auto r = gradcheck({&x}, [&] { return weighted_sum(softmax(use(x), axis), w); });
    EXPECT_LT(r.rel_error, 1e-6) << "axis " << axis;
  }
}

TEST(MaskedSoftmax, MaskedEntriesAreExactZeros) {
  auto y = masked_softmax(Tensor::matrix({{1, 2, 3}, {1, 2, 3}}), std::vector<std::uint8_t>{0, 0, 1, 0, 1, 1});
  EXPECT_EQ(y.at({0, 2}), 0.0);
  EXPECT_EQ(y.at({1, 0}), 1.0);
  EXPECT_NEAR(y.at({0, 0}) + y.at({0, 1}), 1.0, 1e-15);
  EXPECT_THROW(masked_softmax(Tensor({1, 2}), std::vector<std::uint8_t>{1, 1}), ContractError);
}

TEST(Backward, SumGivesOnes) {
  Parameter p("p", Tensor::vector({1.5, -2.0, 3.0}));
  Tape tape;
  {
    Tape::Recording rec(tape);
    tape.backward(sum(use(p)));
  }
  EXPECT_EQ(p.grad, (std::vector<double>{1, 1, 1}));
}

TEST(Backward, SquareGivesTwiceValue) {
  Parameter p("p", Tensor::vector({1.5, -2.0, 3.0}));
  Tape tape;
  {
    Tape::Recording rec(tape);
    auto v = use(p);
    tape.backward(sum(mul(v, v)));
  }
  EXPECT_EQ(p.grad, (std::vector<double>{3, -4, 6}));
}

TEST(Backward, CompositeGraphMatchesFiniteDifferences) {
  Rng rng(17);
  Parameter a("a", random_like({4, 3}, rng)), b("b", random_like({3, 5}, rng));
  auto r = gradcheck({&a, &b}, [&] { return sum(log(softmax(matmul(use(a), use(b)), 1))); });
  EXPECT_LT(r.rel_error, 1e-6);
}

TEST(Backward, RejectsNonScalarLoss) {
  Parameter p("p", Tensor::vector({1, 2}));
  Tape tape;
  Tape::Recording rec(tape);
  auto v = use(p);
  EXPECT_THROW(tape.backward(v), ContractError);
}

TEST(Backward, ConstantsNeverReceiveGradient) {
  Parameter p("p", Tensor::vector({1, 2}));
  Parameter unused("u", Tensor::vector({3, 4}));
  Tensor constant = Tensor::vector({5, 6});
  Tape tape;
  {
    Tape::Recording rec(tape);
    tape.backward(sum(mul(use(p), constant)));
  }
  EXPECT_EQ(p.grad, (std::vector<double>{5, 6}));
  EXPECT_EQ(unused.grad, (std::vector<double>{0, 0}));
  EXPECT_FALSE(constant.on(tape));
}

TEST(Backward, TapeIsResetAfterBackward) {
  Parameter p("p", Tensor::vector({1, 2}));
  Tape tape;
  Tape::Recording rec(tape);
  auto v = use(p);
  auto l = sum(v);
  EXPECT_GT(tape.size(), 0u);
  tape.backward(l);
  EXPECT_EQ(tape.size(), 0u);
  EXPECT_FALSE(v.on(tape));
}

TEST(Backward, IsLinearInTheLoss) {
  Rng rng(23);
  Parameter a("a", random_like({3, 3}, rng)), b("b", random_like({3, 2}, rng));
  auto l1 = [&] { return sum(tanh(matmul(use(a), use(b)))); };
  auto l2 = [&] { return sum(exp(scale(use(a), 0.5))); };
  auto grads = [&](const std::function<Tensor()>& f) {
    a.zero_grad();
    b.zero_grad();
    Tape tape;
    Tape::Recording rec(tape);
    tape.backward(f());
    std::vector<double> g = a.grad;
    g.insert(g.end(), b.grad.begin(), b.grad.end());
    return g;
  };
  const double alpha = 0.7, beta = -1.3;
  auto g1 = grads(l1), g2 = grads(l2);
  auto gc = grads([&] { return add(scale(l1(), alpha), scale(l2(), beta)); });
  for (std::size_t i = 0; i < gc.size(); ++i) EXPECT_NEAR(gc[i], alpha * g1[i] + beta * g2[i], 1e-10);
}

// Every differentiable primitive against central differences on random small
// tensors, 100 seeds each.
TEST(Properties, EveryOpPassesFiniteDifferenceCheck) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const std::size_t m = 1 + rng.below(8), k = 1 + rng.below(8), n = 1 + rng.below(8), bsz = 1 + rng.below(3);
    Parameter a("a", random_like({m, k}, rng)), b("b", random_like({k, n}, rng));
    Parameter x("x", random_like(random_shape(rng, 2), rng)), y("y", random_like(x.value.shape(), rng));
    Parameter s("s", random_like({1}, rng));
    Parameter pos("pos", random_like(x.value.shape(), rng, 0.5, 2.0));
    Parameter bias("bias", random_like({x.value.shape().back()}, rng));
    Parameter ba("ba", random_like({bsz, m, k}, rng)), bb("bb", random_like({bsz, k, n}, rng));
    Parameter table("table", random_like({5, 3}, rng));
    std::vector<std::int32_t> ids;
    for (int i = 0; i < 6; ++i) ids.push_back(static_cast<std::int32_t>(rng.below(5)));
    auto wx = random_like(x.value.shape(), rng);
    auto wmn = random_like({m, n}, rng);
    std::vector<double> factor(x.value.size());
    for (double& f : factor) f = rng.uniform();

    std::vector<std::pair<std::vector<Parameter*>, std::function<Tensor()>>> cases = {
        {{&a, &b}, [&] { return weighted_sum(matmul(use(a), use(b)), wmn); }},
        {{&a, &b}, [&] { return weighted_sum(linear(use(a), use(b)), wmn); }},
        {{&ba, &bb}, [&] { return sum(tanh(bmm(use(ba), use(bb)))); }},
        {{&x, &y}, [&] { return weighted_sum(add(use(x), use(y)), wx); }},
        {{&x, &y}, [&] { return weighted_sum(sub(use(x), use(y)), wx); }},
        {{&x, &y}, [&] { return weighted_sum(mul(use(x), use(y)), wx); }},
        {{&x, &s}, [&] { return weighted_sum(mul(use(s), use(x)), wx); }},
        {{&x}, [&] { return weighted_sum(scale(use(x), -2.5), wx); }},
        {{&x}, [&] { return weighted_sum(exp(use(x)), wx); }},
        {{&pos}, [&] { return weighted_sum(log(use(pos)), wx); }},
        {{&x}, [&] { return weighted_sum(tanh(use(x)), wx); }},
        {{&x, &bias}, [&] { return weighted_sum(add_rowwise(use(x), use(bias)), wx); }},
        {{&x}, [&] { return weighted_sum(transpose_last2(transpose_last2(use(x))), wx); }},
        {{&x}, [&] { return weighted_sum(softmax(use(x), 1), wx); }},
        {{&x}, [&] { return weighted_sum(log_softmax(use(x)), wx); }},
        {{&x}, [&] { return mean(mul(use(x), use(x))); }},
        {{&x}, [&] { return weighted_sum(mul_const(use(x), factor), wx); }},
        {{&x, &y, &s},
         [&] {
           std::vector<Tensor> terms{tanh(use(x)), use(y)};
           auto w = softmax(reshape(add(use(s), Tensor::vector({0.0, 1.0})), {2}), 0);
           return weighted_sum(combine(terms, w), wx);
         }},
        {{&x, &y},
         [&] {
           std::vector<Tensor> terms{use(x), exp(use(y))};
           return weighted_sum(add_n(terms), wx);
         }},
        {{&table}, [&] { return sum(tanh(gather_rows(use(table), ids, {2, 3}))); }},
    };
    for (std::size_t c = 0; c < cases.size(); ++c) {
      auto r = gradcheck(cases[c].first, cases[c].second);
      worst = std::max(worst, r.rel_error);
      EXPECT_LT(r.rel_error, 1e-6) << "case " << c << " seed " << seed;
    }
  }
  RecordProperty("worst_rel_error", std::to_string(worst));
}

TEST(Rng, IdenticalSeedsGiveIdenticalDraws) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, EngineMatchesStandardReferenceValue) {
  // The C++ standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, BelowAndShuffleStayInRange) {
  Rng rng(9);
  std::vector<int> items(20);
  std::iota(items.begin(), items.end(), 0);
  rng.shuffle(std::span<int>(items));
  std::vector<int> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
}

TEST(Sgd, Examples) {
  Parameter p("p", Tensor::scalar(1.0));
  p.grad = {2.0};
  sgd_step({&p}, 0.5);
  EXPECT_DOUBLE_EQ(p.value.item(), 0.0);

  Parameter q("q", Tensor::vector({1.0, -2.0}));
  q.grad = {3.0, 4.0};
  sgd_step({&q}, 0.0);
  EXPECT_EQ(q.value.storage(), (std::vector<double>{1.0, -2.0}));
}

TEST(Sgd, OneStepOnShiftedParabola) {
  Parameter p("p", Tensor::scalar(0.0));
  Tape tape;
  {
    Tape::Recording rec(tape);
    auto d = sub(use(p), Tensor::scalar(3.0));
    tape.backward(mul(d, d));
  }
  EXPECT_DOUBLE_EQ(p.grad[0], -6.0);
  sgd_step({&p}, 0.1);
  EXPECT_NEAR(p.value.item(), 0.6, 1e-15);
}

TEST(Sgd, ShapeMismatchIsDimensionError) {
  Parameter p("p", Tensor::vector({1.0, 2.0}));
  p.grad = {1.0};
  EXPECT_THROW(sgd_step({&p}, 0.1), DimensionError);
}

TEST(Adam, ConvergesOnParabola) {
  Parameter p("p", Tensor::scalar(0.0));
  Optimizer opt(OptimizerKind::kAdam, {&p}, 0.1);
  for (int i = 0; i < 500; ++i) {
    opt.zero_grad();
    Tape tape;
    Tape::Recording rec(tape);
    auto d = sub(use(p), Tensor::scalar(3.0));
    tape.backward(mul(d, d));
    opt.step();
  }
  EXPECT_NEAR(p.value.item(), 3.0, 1e-3);
}

}  // namespace
}  // namespace pdftemra::num
