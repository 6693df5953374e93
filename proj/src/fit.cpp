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

#include "jmie/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jmie/error.hpp"
#include "jmie/log.hpp"
#include "jmie/random.hpp"

namespace jmie {

std::vector<std::vector<std::size_t>> length_sorted_batches(
    const std::vector<std::size_t>& lengths, std::size_t batch) {
  if (batch == 0) throw Error(ErrorCode::kInvalidConfig, "batch size must be positive");
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(i + batch, order.size())));
  }
  return batches;
}

FitResult fit(ad::ParameterSet& params, const std::vector<std::size_t>& lengths,
              const FitConfig& config, const BatchLossFn& batch_loss,
              const DevMetricFn& dev_metric, const std::function<void()>& after_backward,
              const EpochHook& on_epoch) {
  FitResult result;
  auto batches = length_sorted_batches(lengths, config.batch);
  ad::AdamWState state;
  Random rng(config.seed);
  std::vector<std::vector<double>> best_values;
  std::size_t since_best = 0;
  bool have_best = false;
  std::uint64_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(batches);
    EpochLog log_entry;
    log_entry.epoch = epoch;
    for (const auto& batch : batches) {
      ad::Tape tape;
      params.zero_grad();
      const EncodeOptions options{true, config.seed, step++};
      const BatchLoss loss = batch_loss(tape, batch, options);
      if (log_entry.losses.empty()) log_entry.losses.assign(loss.components.size(), 0.0);
      for (std::size_t c = 0; c < loss.components.size(); ++c) {
        const double v = loss.components[c].item();
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::kDivergedLoss, "non-finite loss at epoch " + std::to_string(epoch));
        }
        log_entry.losses[c] += v / static_cast<double>(batches.size());
      }
      tape.backward(loss.components.back());
      if (after_backward) after_backward();
      ad::adamw_step(params, state, config.optimizer);
    }
    log_entry.dev_metric = dev_metric(epoch);
    if (!have_best || log_entry.dev_metric > result.best_metric) {
      have_best = true;
      log_entry.improved = true;
      result.best_metric = log_entry.dev_metric;
      result.best_epoch = epoch;
      best_values.clear();
      for (const auto& p : params) best_values.push_back(p.value);
      since_best = 0;
    } else {
      ++since_best;
    }
    log(LogLevel::kInfo, "epoch ", epoch, " dev ", log_entry.dev_metric,
        log_entry.improved ? " *" : "");
    result.epochs.push_back(log_entry);
    if (on_epoch) on_epoch(log_entry);
    if (since_best >= config.patience) break;
  }
  if (have_best) {
    std::size_t i = 0;
    for (auto& p : params) p.value = best_values[i++];
  }
  return result;
}

}  // namespace jmie
