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
#include <limits>

#include <gtest/gtest.h>

#include "jmie/adamw.hpp"
#include "jmie/error.hpp"

namespace jmie::ad {
namespace {

TEST(AdamW, FirstStepByHand) {
  std::vector<double> p = {1.0};
  const std::vector<double> g = {0.5};
  std::vector<double> m = {0.0};
  std::vector<double> v = {0.0};
  AdamWConfig c;
  c.lr = 0.1;
  c.weight_decay = 0.01;
  adamw_update(p, g, m, v, 1, c);
  // Decay first: 1 - 0.1*0.01 = 0.999. mhat = 0.5, vhat = 0.25.
  const double expected = 0.999 - 0.1 * 0.5 / (0.5 + 1e-8);
  EXPECT_NEAR(p[0], expected, 1e-15);
  EXPECT_NEAR(m[0], 0.05, 1e-15);
  EXPECT_NEAR(v[0], 0.00025, 1e-15);
}

TEST(AdamW, ZeroGradientZeroDecayIsStationary) {
  std::vector<double> p = {0.3, -2.0};
  const std::vector<double> g = {0.0, 0.0};
  std::vector<double> m(2, 0.0);
  std::vector<double> v(2, 0.0);
  AdamWConfig c;
  c.weight_decay = 0.0;
  for (int t = 1; t <= 5; ++t) adamw_update(p, g, m, v, t, c);
  EXPECT_EQ(p, (std::vector<double>{0.3, -2.0}));
}

// Scalar reference over several steps.
TEST(AdamW, MatchesScalarReference) {
  AdamWConfig c;
  c.lr = 0.01;
  c.weight_decay = 0.1;
  ParameterSet set;
  Parameter& w = set.add("w", {3});
  w.value = {0.5, -0.25, 1.5};
  AdamWState state;
  std::vector<double> ref = w.value;
  std::vector<double> m(3, 0.0);
  std::vector<double> v(3, 0.0);
  for (int t = 1; t <= 20; ++t) {
    std::vector<double> g(3);
    for (std::size_t i = 0; i < 3; ++i) g[i] = std::sin(t + static_cast<double>(i)) * ref[i];
    w.grad = g;
    adamw_step(set, state, c);
    for (std::size_t i = 0; i < 3; ++i) {
      ref[i] -= c.lr * c.weight_decay * ref[i];
      m[i] = c.beta1 * m[i] + (1 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1 - c.beta2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(c.beta1, t));
      const double vh = v[i] / (1 - std::pow(c.beta2, t));
      ref[i] -= c.lr * mh / (std::sqrt(vh) + c.eps);
    }
    for (std::size_t i = 0; i < 3; ++i) ASSERT_NEAR(w.value[i], ref[i], 1e-14) << "step " << t;
  }
  EXPECT_EQ(state.step, 20);
}

TEST(AdamW, NonFiniteGradientLeavesValuesUntouched) {
  ParameterSet set;
  Parameter& a = set.add("a", {1});
  Parameter& b = set.add("b", {1});
  a.value = {1.0};
  b.value = {2.0};
  a.grad = {1.0};
  b.grad = {std::numeric_limits<double>::quiet_NaN()};
  AdamWState state;
  try {
    adamw_step(set, state, AdamWConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteGradient);
  }
  EXPECT_EQ(a.value[0], 1.0);
  EXPECT_EQ(b.value[0], 2.0);
}

TEST(AdamW, FrozenParametersAreSkipped) {
  ParameterSet set;
  Parameter& a = set.add("a", {2});
  a.value = {1.0, 1.0};
  a.grad = {1.0, 1.0};
  a.trainable = false;
  AdamWState state;
  adamw_step(set, state, AdamWConfig{});
  EXPECT_EQ(a.value, (std::vector<double>{1.0, 1.0}));
}

}  // namespace
}  // namespace jmie::ad
