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

#ifndef JMIE_ADAMW_HPP_
#define JMIE_ADAMW_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "jmie/tensor.hpp"

namespace jmie::ad {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// First and second moments per parameter, created zeroed on first use.
struct AdamWState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t step = 0;
};

// One update of a single array at (1-based) step t:
//   p <- p - lr*wd*p, then p <- p - lr * mhat / (sqrt(vhat) + eps)
// with bias-corrected moments mhat = m/(1-beta1^t), vhat = v/(1-beta2^t).
void adamw_update(std::span<double> param, std::span<const double> grad,
                  std::span<double> m, std::span<double> v, std::int64_t t,
                  const AdamWConfig& config);

// Applies one step to every parameter from its accumulated gradient.
// Throws NonFiniteGradient (before touching any value) if a gradient is
// NaN or infinite.
void adamw_step(ParameterSet& params, AdamWState& state,
                const AdamWConfig& config);

}  // namespace jmie::ad

#endif  // JMIE_ADAMW_HPP_
