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

#include "jmie/adamw.hpp"

#include <cmath>

#include "jmie/error.hpp"

namespace jmie::ad {

void adamw_update(std::span<double> param, std::span<const double> grad,
                  std::span<double> m, std::span<double> v, std::int64_t t,
                  const AdamWConfig& config) {
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    param[i] -= config.lr * config.weight_decay * param[i];
    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    param[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

void adamw_step(ParameterSet& params, AdamWState& state,
                const AdamWConfig& config) {
  for (const auto& p : params) {
    for (double g : p.grad) {
      if (!std::isfinite(g)) {
        throw Error(ErrorCode::kNonFiniteGradient, "gradient of " + p.name);
      }
    }
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer state does not match parameters");
  }
  ++state.step;
  std::size_t k = 0;
  for (auto& p : params) {
    if (!p.trainable) {
      ++k;
      continue;
    }
    adamw_update(p.value, p.grad, state.m[k], state.v[k], state.step, config);
    ++k;
  }
}

}  // namespace jmie::ad
