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

#ifndef JMIE_TESTS_TEST_UTIL_HPP_
#define JMIE_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "jmie/corpus.hpp"
#include "jmie/random.hpp"
#include "jmie/tensor.hpp"

namespace jmie::testing {

struct GradCheck {
  double rel_error = 0.0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// Norm-wise relative error between two gradient vectors.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::max(std::sqrt(std::max(na, nb)), 1e-12);
  return std::sqrt(diff) / denom;
}

// Compares tape gradients of a scalar function of the parameters against
// central differences with step h. build() records the function on a
// fresh tape and returns the scalar.
inline GradCheck check_gradients(std::vector<ad::Parameter*> params,
                                 const std::function<ad::Tensor(ad::Tape&)>& build,
                                 double h = 1e-5) {
  GradCheck out;
  for (auto* p : params) std::fill(p->grad.begin(), p->grad.end(), 0.0);
  {
    ad::Tape tape;
    tape.backward(build(tape));
  }
  for (auto* p : params) out.analytic.insert(out.analytic.end(), p->grad.begin(), p->grad.end());
  for (auto* p : params) {
    for (double& v : p->value) {
      const double saved = v;
      v = saved + h;
      double plus;
      {
        ad::Tape tape;
        plus = build(tape).item();
      }
      v = saved - h;
      double minus;
      {
        ad::Tape tape;
        minus = build(tape).item();
      }
      v = saved;
      out.numeric.push_back((plus - minus) / (2.0 * h));
    }
  }
  out.rel_error = relative_error(out.analytic, out.numeric);
  return out;
}

inline ad::Parameter random_param(const std::string& name, ad::Shape shape, Random& rng,
                                  double bound = 1.0) {
  ad::Parameter p(name, std::move(shape));
  for (double& v : p.value) v = rng.uniform(-bound, bound);
  return p;
}

// Non-overlapping spans of length 1-3 in one sentence of n tokens.
inline std::vector<ConceptSpan> random_spans(Random& rng, std::size_t n) {
  std::vector<ConceptSpan> spans;
  int pos = 0;
  while (pos < static_cast<int>(n)) {
    if (rng.chance(0.4)) {
      const int len = 1 + static_cast<int>(rng.below(3));
      const int end = std::min(pos + len - 1, static_cast<int>(n) - 1);
      spans.push_back(ConceptSpan{0, pos, end, static_cast<ConceptType>(rng.below(3))});
      pos = end + 1;
    } else {
      ++pos;
    }
  }
  return spans;
}

}  // namespace jmie::testing

#endif  // JMIE_TESTS_TEST_UTIL_HPP_
