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

#ifndef JMIE_FIT_HPP_
#define JMIE_FIT_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jmie/adamw.hpp"
#include "jmie/encoder.hpp"
#include "jmie/tensor.hpp"

namespace jmie {

struct FitConfig {
  ad::AdamWConfig optimizer;
  std::size_t batch = 32;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::uint64_t seed = 1;
};

// Loss components (e.g. concept, assertion, relation, total) reported for
// a batch; the last entry is what backward() runs on.
struct BatchLoss {
  std::vector<ad::Tensor> components;
};

struct EpochLog {
  std::size_t epoch = 0;
  // Per-component losses averaged over the epoch's batches.
  std::vector<double> losses;
  double dev_metric = 0.0;
  bool improved = false;
};

struct FitResult {
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;
  double best_metric = 0.0;
};

using BatchLossFn = std::function<BatchLoss(
    ad::Tape& tape, std::span<const std::size_t> batch, const EncodeOptions& options)>;
// Dev metric for the current parameters (larger is better).
using DevMetricFn = std::function<double(std::size_t epoch)>;
using EpochHook = std::function<void(const EpochLog&)>;

// Length-sorted batches, shuffled batch order per epoch, AdamW, early
// stopping on the dev metric. Restores the best parameters before
// returning. Throws DivergedLoss on a non-finite batch loss.
FitResult fit(ad::ParameterSet& params, const std::vector<std::size_t>& lengths,
              const FitConfig& config, const BatchLossFn& batch_loss,
              const DevMetricFn& dev_metric, const std::function<void()>& after_backward = {},
              const EpochHook& on_epoch = {});

// Batches of example indices sorted by (length, index), chunked by size.
std::vector<std::vector<std::size_t>> length_sorted_batches(
    const std::vector<std::size_t>& lengths, std::size_t batch);

}  // namespace jmie

#endif  // JMIE_FIT_HPP_
