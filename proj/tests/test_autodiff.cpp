// Copyright 2026 The vmpo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmpo/autodiff.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "vmpo/grad_check.hpp"
#include "vmpo/param_store.hpp"
#include "vmpo/rng.hpp"

namespace vmpo {
namespace {

TEST(Tensor, ShapeAndData) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6);
  EXPECT_EQ(t.rows(), 2);
  EXPECT_EQ(t.cols(), 3);
  Tensor s = Tensor::scalar(4.0);
  EXPECT_EQ(s.rank(), 0);
  EXPECT_EQ(s.value(), 4.0);
  EXPECT_THROW(Tensor({2}, {1.0, 2.0, 3.0}), std::invalid_argument);
  EXPECT_THROW(t.value(), std::invalid_argument);
}

TEST(Forward, LogsumexpSymmetricPair) {
  Graph g;
  NodeRef x = g.constant(Tensor({2}, {0.0, 0.0}));
  NodeRef y = ad::logsumexp(x);
  EXPECT_NEAR(y->data.value(), std::log(2.0), 1e-15);
}

TEST(Forward, LogsumexpAndSoftmaxOverflowSafe) {
  Graph g;
  NodeRef x = g.constant(Tensor({3}, {1e3, -1e3, 999.5}));
  NodeRef lse = ad::logsumexp(x);
  EXPECT_TRUE(std::isfinite(lse->data.value()));
  NodeRef sm = ad::softmax(x);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(std::isfinite(sm->data[i]));
    sum += sm->data[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Forward, StopGradientBlocksFlow) {
  Graph g;
  NodeRef x = g.leaf(Tensor({2}, {1.5, -2.0}));
  NodeRef y = ad::stop_gradient(x);
  EXPECT_EQ(y->data[0], 1.5);
  EXPECT_FALSE(y->requires_grad);
  // d/dx sum(sg(x) * x) = sg(x), not 2x.
  NodeRef loss = ad::sum(ad::mul(y, x));
  g.backward(loss);
  EXPECT_DOUBLE_EQ(x->grad[0], 1.5);
  EXPECT_DOUBLE_EQ(x->grad[1], -2.0);
}

TEST(Forward, MatmulAgainstHandOracle) {
  // 2x3 times 3x2 against a hand multiply.
  Graph g;
  NodeRef a = g.constant(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  NodeRef b = g.constant(Tensor({3, 2}, {7, 8, 9, 10, 11, 12}));
  NodeRef c = ad::matmul(a, b);
  const double expect[4] = {1 * 7 + 2 * 9 + 3 * 11, 1 * 8 + 2 * 10 + 3 * 12,
                            4 * 7 + 5 * 9 + 6 * 11, 4 * 8 + 5 * 10 + 6 * 12};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(c->data[i], expect[i]);
}

TEST(Forward, ShapeMismatchNamesOpAndShapes) {
  Graph g;
  NodeRef a = g.constant(Tensor({2, 3}));
  NodeRef b = g.constant(Tensor({2, 3}));
  try {
    ad::matmul(a, b);
    FAIL() << "expected shape error";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos);
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos);
  }
  NodeRef c = g.constant(Tensor({4}));
  EXPECT_THROW(ad::add(a, c), std::invalid_argument);
}

TEST(Backward, PowerRuleExamples) {
  {
    Graph g;
    NodeRef x = g.leaf(Tensor::scalar(3.0));
    NodeRef loss = ad::square(x);
    g.backward(loss);
    EXPECT_DOUBLE_EQ(x->grad[0], 6.0);
  }
  {
    Graph g;
    NodeRef x = g.leaf(Tensor::scalar(2.0));
    NodeRef loss = ad::mul(ad::square(x), x);  // x^3
    g.backward(loss);
    EXPECT_DOUBLE_EQ(x->grad[0], 12.0);
  }
}

TEST(Backward, NonScalarLossRejected) {
  Graph g;
  NodeRef x = g.leaf(Tensor({2}, {1.0, 2.0}));
  NodeRef y = ad::square(x);
  EXPECT_THROW(g.backward(y), std::invalid_argument);
}

TEST(Backward, RepeatAfterZeroGradIsBitIdentical) {
  RngEngine rng(7);
  Graph g;
  NodeRef x = g.leaf(Tensor({3, 4}));
  NodeRef w = g.leaf(Tensor({4, 2}));
  for (std::int64_t i = 0; i < x->data.size(); ++i) x->data[i] = draw_normal(rng);
  for (std::int64_t i = 0; i < w->data.size(); ++i) w->data[i] = draw_normal(rng);
  NodeRef loss = ad::mean(ad::square(ad::tanh(ad::matmul(x, w))));
  g.backward(loss);
  std::vector<double> first(x->grad.data(), x->grad.data() + x->grad.size());
  std::vector<double> first_w(w->grad.data(), w->grad.data() + w->grad.size());
  g.zero_grad();
  g.backward(loss);
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i], x->grad[i]);
  for (std::size_t i = 0; i < first_w.size(); ++i) EXPECT_EQ(first_w[i], w->grad[i]);
}

TEST(Backward, AccumulatesAcrossCalls) {
  Graph g;
  NodeRef x = g.leaf(Tensor::scalar(3.0));
  NodeRef loss = ad::square(x);
  g.backward(loss);
  g.backward(loss);
  EXPECT_DOUBLE_EQ(x->grad[0], 12.0);
}

// Finite-difference checks for every registered op kind at 100 random
// points each, relative tolerance 1e-6 with step 1e-6. stop_gradient is the
// one exception: its defining property is to disagree with the true
// derivative, so it is verified analytically above.

constexpr int kPoints = 100;
constexpr double kTol = 1e-6;

void check_op(const std::string& name, const TensorProgram& builder,
              const std::vector<std::vector<int>>& shapes, double lo, double hi) {
  RngEngine rng(std::hash<std::string>{}(name));
  for (int p = 0; p < kPoints; ++p) {
    ParameterStore store;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      store.add("x" + std::to_string(i), shapes[i]);
      auto s = store.slice(i);
      for (auto& v : s) v = draw_uniform(rng, lo, hi);
    }
    const GradCheckResult r = grad_check(builder, store, 1e-6);
    ASSERT_LE(r.max_rel_error, kTol)
        << name << " at point " << p << ", worst " << r.worst_name;
  }
}

// Weights the output elements so gradient routing errors cannot cancel.
NodeRef weighted_sum(Graph& g, NodeRef x) {
  Tensor w(x->data.shape());
  for (std::int64_t i = 0; i < w.size(); ++i) w[i] = 0.25 * static_cast<double>(i + 1);
  return ad::sum(ad::mul(g.constant(std::move(w)), x));
}

TEST(GradFD, Matmul) {
  check_op("matmul",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::matmul(v[0], v[1]));
           },
           {{3, 4}, {4, 2}}, -2.0, 2.0);
}

TEST(GradFD, Affine) {
  check_op("affine",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::affine(v[0], v[1], v[2]));
           },
           {{3, 4}, {4, 2}, {2}}, -2.0, 2.0);
}

TEST(GradFD, AddSubMulSameShape) {
  check_op("add",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::add(v[0], v[1]));
           },
           {{2, 3}, {2, 3}}, -2.0, 2.0);
  check_op("sub",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::sub(v[0], v[1]));
           },
           {{2, 3}, {2, 3}}, -2.0, 2.0);
  check_op("mul",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::mul(v[0], v[1]));
           },
           {{2, 3}, {2, 3}}, -2.0, 2.0);
}

TEST(GradFD, BinaryScalarOperand) {
  check_op("add_scalar",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::add(v[0], v[1]));
           },
           {{2, 3}, {}}, -2.0, 2.0);
  check_op("scalar_div",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::div(v[1], v[0]));
           },
           {{2, 3}, {}}, 0.5, 2.0);
  check_op("mul_scalar",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::mul(v[1], v[0]));
           },
           {{2, 3}, {}}, -2.0, 2.0);
}

TEST(GradFD, Div) {
  check_op("div",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::div(v[0], v[1]));
           },
           {{2, 3}, {2, 3}}, 0.5, 2.0);
}

TEST(GradFD, Max) {
  check_op("max",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::max(v[0], v[1]));
           },
           {{2, 3}, {2, 3}}, -2.0, 2.0);
}

TEST(GradFD, Unaries) {
  check_op("neg",
           [](Graph& g, const std::vector<NodeRef>& v) { return weighted_sum(g, ad::neg(v[0])); },
           {{2, 3}}, -2.0, 2.0);
  check_op("exp",
           [](Graph& g, const std::vector<NodeRef>& v) { return weighted_sum(g, ad::exp(v[0])); },
           {{2, 3}}, -2.0, 2.0);
  check_op("log",
           [](Graph& g, const std::vector<NodeRef>& v) { return weighted_sum(g, ad::log(v[0])); },
           {{2, 3}}, 0.5, 3.0);
  check_op("tanh",
           [](Graph& g, const std::vector<NodeRef>& v) { return weighted_sum(g, ad::tanh(v[0])); },
           {{2, 3}}, -2.0, 2.0);
  check_op("relu",
           [](Graph& g, const std::vector<NodeRef>& v) { return weighted_sum(g, ad::relu(v[0])); },
           {{2, 3}}, -2.0, 2.0);
  check_op("square",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::square(v[0]));
           },
           {{2, 3}}, -2.0, 2.0);
}

TEST(GradFD, Reductions) {
  check_op("sum_all",
           [](Graph& g, const std::vector<NodeRef>& v) {
             (void)g;
             return ad::sum(v[0]);
           },
           {{2, 3}}, -2.0, 2.0);
  check_op("sum_last",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::sum(v[0], ReduceAxis::kLast));
           },
           {{2, 3}}, -2.0, 2.0);
  check_op("mean",
           [](Graph& g, const std::vector<NodeRef>& v) {
             (void)g;
             return ad::mean(v[0]);
           },
           {{2, 3}}, -2.0, 2.0);
  check_op("logsumexp_rows",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::logsumexp(v[0]));
           },
           {{2, 3}}, -2.0, 2.0);
  check_op("logsumexp_vector",
           [](Graph& g, const std::vector<NodeRef>& v) {
             (void)g;
             return ad::logsumexp(v[0]);
           },
           {{5}}, -2.0, 2.0);
  check_op("softmax",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::softmax(v[0]));
           },
           {{2, 3}}, -2.0, 2.0);
}

TEST(GradFD, ConcatSlice) {
  check_op("concat",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::concat(v[0], v[1]));
           },
           {{2, 2}, {2, 3}}, -2.0, 2.0);
  check_op("slice",
           [](Graph& g, const std::vector<NodeRef>& v) {
             return weighted_sum(g, ad::slice(v[0], 1, 3));
           },
           {{2, 5}}, -2.0, 2.0);
}

TEST(GradCheck, LinearFunctionIsExact) {
  // Central differences have no truncation error on a linear map, so a
  // coarse step leaves only negligible cancellation error.
  ParameterStore store;
  store.add("x", {4});
  RngEngine rng(3);
  for (auto& v : store.slice(0)) v = draw_normal(rng);
  const GradCheckResult r = grad_check(
      [](Graph& g, const std::vector<NodeRef>& v) { return weighted_sum(g, v[0]); }, store,
      1e-3);
  EXPECT_LE(r.max_rel_error, 1e-10);
}

TEST(GradCheck, ExpAtOneWithinTruncationBound) {
  ParameterStore store;
  store.add("x", {});
  store.slice(0)[0] = 1.0;
  const GradCheckResult r = grad_check(
      [](Graph& g, const std::vector<NodeRef>& v) {
        (void)g;
        return ad::exp(v[0]);
      },
      store, 1e-6);
  EXPECT_LE(r.max_rel_error, 1e-6);
}

TEST(GradCheck, CompositeMlpMatchesFiniteDifferences) {
  ParameterStore store;
  store.add("w", {3, 2});
  store.add("b", {2});
  store.add("x", {4, 3});
  RngEngine rng(11);
  for (std::size_t e = 0; e < store.entry_count(); ++e) {
    for (auto& v : store.slice(e)) v = draw_normal(rng);
  }
  const GradCheckResult r = grad_check(
      [](Graph& g, const std::vector<NodeRef>& v) {
        (void)g;
        return ad::mean(ad::square(ad::tanh(ad::affine(v[2], v[0], v[1]))));
      },
      store, 1e-6);
  EXPECT_LE(r.max_rel_error, 1e-6);
}

TEST(GradCheck, NonFiniteProbeIdentifiesCoordinate) {
  ParameterStore store;
  store.add("x", {});
  store.slice(0)[0] = 1e-7;  // log turns NaN at the -step probe
  try {
    grad_check(
        [](Graph& g, const std::vector<NodeRef>& v) {
          (void)g;
          return ad::log(v[0]);
        },
        store, 1e-6);
    FAIL() << "expected non-finite failure";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("x[0]"), std::string::npos);
  }
}

}  // namespace
}  // namespace vmpo
