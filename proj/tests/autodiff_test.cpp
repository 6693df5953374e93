// Copyright 2026 The JMIE Authors.
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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "jmie/error.hpp"
#include "jmie/ops.hpp"
#include "gradient_cases.hpp"
#include "test_util.hpp"

namespace jmie::ad {
namespace {


constexpr double kPrimitiveTol = 1e-6;

class PrimitiveGradients : public ::testing::TestWithParam<testing::GradientCase> {};

TEST_P(PrimitiveGradients, MatchFiniteDifferences) {
  EXPECT_LT(GetParam().run(), kPrimitiveTol);
}

INSTANTIATE_TEST_SUITE_P(AllOps, PrimitiveGradients,
                         ::testing::ValuesIn(testing::primitive_gradient_cases()),
                         [](const auto& info) { return info.param.name; });

TEST(OpValues, MaskedSoftmaxZerosMaskedCells) {
  Tape tape;
  const Tensor a = tape.constant({2, 4}, {0.3, 2.0, -1.0, 0.5, 1.0, 1.0, 1.0, 1.0});
  const std::vector<double> mask = {1, 0, 1, 1, 0, 1, 1, 0};
  const Tensor s = softmax(a, 1, mask);
  EXPECT_EQ(s.at(0, 1), 0.0);
  EXPECT_NEAR(s.at(0, 0) + s.at(0, 2) + s.at(0, 3), 1.0, 1e-12);
  EXPECT_NEAR(s.at(1, 1), 0.5, 1e-15);
}

TEST(OpValues, PairSumLayout) {
  Tape t;
  const Tensor a = t.constant({2, 1}, {10, 20});
  const Tensor b = t.constant({2, 1}, {1, 2});
  const Tensor p = pair_sum(a, b);
  // Row i*n + j is a[j] + b[i].
  EXPECT_EQ(p.at(0), 11);
  EXPECT_EQ(p.at(1), 21);
  EXPECT_EQ(p.at(2), 12);
  EXPECT_EQ(p.at(3), 22);
}

TEST(OpValues, SegmentSumOfSingleRowIsThatRow) {
  Tape t;
  const Tensor x = t.constant({3, 2}, {1, 2, 3, 4, 5, 6});
  const std::vector<std::pair<int, int>> ranges = {{1, 1}, {0, 2}};
  const Tensor s = segment_sum(x, ranges);
  EXPECT_EQ(s.at(0, 0), 3);
  EXPECT_EQ(s.at(0, 1), 4);
  EXPECT_EQ(s.at(1, 0), 9);
  EXPECT_EQ(s.at(1, 1), 12);
}

TEST(OpValues, LogsumexpIsStableForLargeInputs) {
  Tape t;
  const Tensor x = t.constant({1, 2}, {1000.0, 1000.0});
  EXPECT_NEAR(logsumexp(x, 1).item(), 1000.0 + std::log(2.0), 1e-9);
}

TEST(OpValues, DropoutIsIdentityOutsideTraining) {
  Tape t;
  const Tensor x = t.constant({1, 3}, {1, 2, 3});
  const Tensor y = dropout(x, 0.5, false, 1, 1);
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{1, 2, 3}));
}

TEST(OpValues, DropoutMaskIsKeyedBySeedAndStep) {
  auto run = [](std::uint64_t seed, std::uint64_t step) {
    Tape t;
    const Tensor x = t.constant({1, 64}, std::vector<double>(64, 1.0));
    const Tensor y = dropout(x, 0.5, true, seed, step);
    return std::vector<double>(y.data().begin(), y.data().end());
  };
  EXPECT_EQ(run(3, 4), run(3, 4));
  EXPECT_NE(run(3, 4), run(3, 5));
  for (double v : run(3, 4)) EXPECT_TRUE(v == 0.0 || v == 2.0);
}

TEST(OpErrors, CrossEntropyTargetOutsideSupportThrows) {
  Tape t;
  const Tensor z = t.constant({1, 3}, {0, 0, 0});
  const std::vector<int> targets = {1};
  const std::vector<double> cells = {1, 0, 1};
  try {
    cross_entropy(z, targets, {}, cells);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
}

TEST(OpErrors, ShapeMismatch) {
  Tape t;
  const Tensor a = t.zeros({2, 3});
  const Tensor b = t.zeros({2, 3});
  try {
    matmul(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Tape, BackwardNeedsScalar) {
  Tape t;
  const Tensor a = t.zeros({2});
  try {
    t.backward(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonScalarLoss);
  }
}

TEST(Tape, GradientsAccumulateAcrossTapes) {
  Parameter p("p", {2});
  p.value = {1.0, 2.0};
  for (int i = 0; i < 2; ++i) {
    Tape t;
    t.backward(sum(mul(t.param(p), t.param(p))));
  }
  EXPECT_EQ(p.grad, (std::vector<double>{4.0, 8.0}));
}

TEST(Tape, FrozenCopyGetsNoGradient) {
  Parameter p("p", {2});
  p.value = {1.0, 2.0};
  Tape t;
  t.backward(sum(t.frozen(p)));
  EXPECT_EQ(p.grad, (std::vector<double>{0.0, 0.0}));
}

TEST(Tape, SharedSubexpressionGradient) {
  Parameter p("p", {1});
  p.value = {3.0};
  Tape t;
  const Tensor x = t.param(p);
  const Tensor y = mul(x, x);
  t.backward(sum(add(y, y)));
  EXPECT_DOUBLE_EQ(p.grad[0], 12.0);
}

TEST(Tape, CheckFiniteRejectsNaN) {
  Tape t(true);
  try {
    t.constant({1}, {std::nan("")});
    const Tensor a = t.constant({1}, {-1.0});
    const Tensor b = t.constant({1}, {std::numeric_limits<double>::infinity()});
    add(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteValue);
  }
}

}  // namespace
}  // namespace jmie::ad
