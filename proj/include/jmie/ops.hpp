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

#ifndef JMIE_OPS_HPP_
#define JMIE_OPS_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "jmie/tensor.hpp"

namespace jmie::ad {

// Masks are {0,1} arrays with the same number of elements as the masked
// operand (or one entry per row where noted). An empty span means unmasked.
using Mask = std::span<const double>;

enum class Reduction { kSum, kMean };

// (m x k) @ (k x n)
Tensor matmul(const Tensor& a, const Tensor& b);
// Same-shape addition, or matrix (m x n) plus bias vector (n).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// Softmax along an axis of a vector or matrix. Masked-out entries get
// probability zero and receive no gradient.
Tensor softmax(const Tensor& x, std::size_t axis, Mask mask = {});
Tensor log_softmax(const Tensor& x, std::size_t axis);
// Reduces one axis: matrix -> vector, vector -> scalar.
Tensor logsumexp(const Tensor& x, std::size_t axis);

// Gathers rows of a matrix: result row r = table[indices[r]].
Tensor embedding_lookup(const Tensor& table, std::span<const int> indices);
// Gathers rows straight from parameter storage without binding the whole
// table to the tape; gradients scatter into p.grad when trainable.
Tensor gather_rows(Tape& tape, Parameter& table, std::span<const int> indices,
                   bool trainable);
// Gathers single elements of the flattened operand into a vector.
Tensor pick(const Tensor& x, std::span<const std::size_t> flat_indices);
// Row r of a matrix as a vector.
Tensor row(const Tensor& x, std::size_t r);
// Half-open range along an axis.
Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin,
             std::size_t end);
Tensor sum(const Tensor& x);
Tensor transpose(const Tensor& x);
Tensor reshape(const Tensor& x, Shape shape);

// Inverted dropout with a counter-based mask keyed by (seed, step, node id).
Tensor dropout(const Tensor& x, double p, bool train, std::uint64_t seed,
               std::uint64_t step);

// Softmax cross-entropy of logits (rows x classes) against integer targets.
// row_mask selects contributing rows; cell_mask (rows x classes) restricts
// the softmax support. kMean divides by the number of contributing rows
// (zero rows give a zero loss).
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets,
                     Mask row_mask = {}, Mask cell_mask = {},
                     Reduction reduction = Reduction::kMean);
// Elementwise sigmoid binary cross-entropy on logits; kMean divides by the
// number of unmasked cells.
Tensor bce_with_logits(const Tensor& logits, std::span<const double> targets,
                       Mask mask = {}, Reduction reduction = Reduction::kMean);

// Pair expansion for head selection: for a (n x m) and b (n x m) the result
// is (n*n x m) with row i*n + j equal to a[j] + b[i].
Tensor pair_sum(const Tensor& a, const Tensor& b);
// Row r of the result is the sum of rows ranges[r].first..ranges[r].second
// (inclusive) of x.
Tensor segment_sum(const Tensor& x,
                   std::span<const std::pair<int, int>> ranges);

}  // namespace jmie::ad

#endif  // JMIE_OPS_HPP_
