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

#ifndef JMIE_TESTS_GRADIENT_CASES_HPP_
#define JMIE_TESTS_GRADIENT_CASES_HPP_

#include <functional>
#include <string>
#include <vector>

#include "jmie/ops.hpp"
#include "test_util.hpp"

namespace jmie::testing {

// A finite-difference check of one or more primitives; run() returns the
// norm-wise relative error.
struct GradientCase {
  std::string name;
  std::function<double()> run;
};

// sum(t * c) for a fixed random c, so every output element matters.
inline ad::Tensor weighted_sum(ad::Tape& tape, const ad::Tensor& t, std::uint64_t seed = 99) {
  Random rng(seed);
  std::vector<double> c(t.numel());
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  return ad::sum(ad::mul(t, tape.constant(t.shape(), c)));
}

inline std::vector<GradientCase> primitive_gradient_cases() {
  using namespace jmie::ad;
  using Fn = std::function<Tensor(Tape&)>;
  auto check = [](std::vector<Parameter>& ps, const Fn& f) {
    std::vector<Parameter*> ptrs;
    for (auto& p : ps) ptrs.push_back(&p);
    return check_gradients(ptrs, f).rel_error;
  };
  std::vector<GradientCase> cases;
  cases.push_back({"matmul", [=] {
    Random rng(1);
    std::vector<Parameter> p = {random_param("a", {3, 4}, rng), random_param("b", {4, 2}, rng)};
    return check(p, [&](Tape& t) { return weighted_sum(t, matmul(t.param(p[0]), t.param(p[1]))); });
  }});
  cases.push_back({"add_sub_mul_scale", [=] {
    Random rng(2);
    std::vector<Parameter> p = {random_param("a", {2, 3}, rng), random_param("b", {2, 3}, rng),
                                random_param("bias", {3}, rng)};
    return check(p, [&](Tape& t) {
      const Tensor x = add(t.param(p[0]), t.param(p[2]));
      const Tensor y = sub(mul(x, t.param(p[1])), scale(t.param(p[0]), 0.7));
      return weighted_sum(t, add(y, t.param(p[1])));
    });
  }});
  cases.push_back({"concat", [=] {
    Random rng(3);
    std::vector<Parameter> p = {random_param("a", {2, 3}, rng), random_param("b", {2, 2}, rng),
                                random_param("c", {1, 5}, rng)};
    return check(p, [&](Tape& t) {
      const Tensor wide = concat({t.param(p[0]), t.param(p[1])}, 1);
      return weighted_sum(t, concat({wide, t.param(p[2])}, 0));
    });
  }});
  cases.push_back({"tanh_sigmoid", [=] {
    Random rng(4);
    std::vector<Parameter> p = {random_param("a", {3, 3}, rng, 2.0)};
    return check(p, [&](Tape& t) {
      return add(weighted_sum(t, tanh(t.param(p[0])), 1), weighted_sum(t, sigmoid(t.param(p[0])), 2));
    });
  }});
  for (std::size_t axis : {0u, 1u}) {
    cases.push_back({"softmax_logsoftmax_logsumexp_axis" + std::to_string(axis), [=] {
      Random rng(5);
      std::vector<Parameter> p = {random_param("a", {3, 4}, rng, 2.0)};
      return check(p, [&](Tape& t) {
        return add(add(weighted_sum(t, softmax(t.param(p[0]), axis), 3),
                       weighted_sum(t, log_softmax(t.param(p[0]), axis), 4)),
                   weighted_sum(t, logsumexp(t.param(p[0]), axis), 5));
      });
    }});
  }
  cases.push_back({"masked_softmax", [=] {
    Random rng(6);
    std::vector<Parameter> p = {random_param("a", {2, 4}, rng, 2.0)};
    const std::vector<double> mask = {1, 0, 1, 1, 0, 1, 1, 0};
    return check(p, [&](Tape& t) { return weighted_sum(t, softmax(t.param(p[0]), 1, mask)); });
  }});
  cases.push_back({"lookup_gather_pick_row_slice", [=] {
    Random rng(7);
    std::vector<Parameter> p = {random_param("table", {5, 3}, rng)};
    const std::vector<int> idx = {4, 0, 4, 2};
    const std::vector<std::size_t> flat = {0, 7, 7, 14};
    return check(p, [&](Tape& t) {
      const Tensor x = t.param(p[0]);
      Tensor acc = weighted_sum(t, embedding_lookup(x, idx), 1);
      acc = add(acc, weighted_sum(t, gather_rows(t, p[0], idx, true), 2));
      acc = add(acc, weighted_sum(t, pick(x, flat), 3));
      acc = add(acc, weighted_sum(t, row(x, 3), 4));
      acc = add(acc, weighted_sum(t, slice(x, 0, 1, 4), 5));
      return add(acc, weighted_sum(t, slice(x, 1, 1, 3), 6));
    });
  }});
  cases.push_back({"sum_transpose_reshape", [=] {
    Random rng(8);
    std::vector<Parameter> p = {random_param("a", {2, 3}, rng)};
    return check(p, [&](Tape& t) {
      const Tensor x = t.param(p[0]);
      return add(add(sum(x), weighted_sum(t, transpose(x), 7)),
                 weighted_sum(t, reshape(x, {3, 2}), 8));
    });
  }});
  cases.push_back({"dropout_train", [=] {
    Random rng(9);
    std::vector<Parameter> p = {random_param("a", {4, 5}, rng)};
    return check(p, [&](Tape& t) { return weighted_sum(t, dropout(t.param(p[0]), 0.3, true, 11, 3)); });
  }});
  for (Reduction red : {Reduction::kSum, Reduction::kMean}) {
    cases.push_back({red == Reduction::kSum ? "cross_entropy_sum" : "cross_entropy_mean", [=] {
      Random rng(10);
      std::vector<Parameter> p = {random_param("z", {3, 4}, rng, 2.0)};
      const std::vector<int> targets = {2, 0, 3};
      const std::vector<double> rows = {1, 0, 1};
      const std::vector<double> cells = {1, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1, 1};
      return check(p, [&](Tape& t) { return cross_entropy(t.param(p[0]), targets, rows, cells, red); });
    }});
  }
  cases.push_back({"bce_with_logits", [=] {
    Random rng(11);
    std::vector<Parameter> p = {random_param("z", {2, 3}, rng, 3.0)};
    const std::vector<double> targets = {1, 0, 0, 1, 1, 0};
    const std::vector<double> mask = {1, 1, 0, 1, 1, 1};
    return check(p, [&](Tape& t) {
      return add(bce_with_logits(t.param(p[0]), targets, mask, Reduction::kSum),
                 bce_with_logits(t.param(p[0]), targets, {}, Reduction::kMean));
    });
  }});
  cases.push_back({"pair_sum_segment_sum", [=] {
    Random rng(12);
    std::vector<Parameter> p = {random_param("a", {3, 2}, rng), random_param("b", {3, 2}, rng)};
    const std::vector<std::pair<int, int>> ranges = {{0, 1}, {2, 2}, {0, 2}};
    return check(p, [&](Tape& t) {
      return add(weighted_sum(t, pair_sum(t.param(p[0]), t.param(p[1])), 1),
                 weighted_sum(t, segment_sum(t.param(p[0]), ranges), 2));
    });
  }});
  return cases;
}

}  // namespace jmie::testing

#endif  // JMIE_TESTS_GRADIENT_CASES_HPP_
