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

#ifndef JMIE_CRF_HPP_
#define JMIE_CRF_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "jmie/corpus.hpp"
#include "jmie/tensor.hpp"

namespace jmie {

// Linear-chain CRF scores bound to a tape: transitions (T x T, row = previous
// tag), start (T) and stop (T) vectors.
struct CrfTensors {
  ad::Tensor transitions;
  ad::Tensor start;
  ad::Tensor stop;
};

// start[y0] + sum_i emissions[i, y_i] + sum_i A[y_{i-1}, y_i] + stop[y_n]
ad::Tensor crf_sequence_score(const ad::Tensor& emissions, const TagSequence& tags,
                              const CrfTensors& crf);
// log of the sum over all T^n tag sequences of exp(score), by the forward
// algorithm in log space.
ad::Tensor crf_log_partition(const ad::Tensor& emissions, const CrfTensors& crf);
// -log P(tags | emissions) = log_partition - sequence_score.
ad::Tensor crf_nll(const ad::Tensor& emissions, const TagSequence& tags,
                   const CrfTensors& crf);

// Plain-value CRF parameters for decoding.
struct CrfWeights {
  std::size_t num_tags = 0;
  std::vector<double> transitions;
  std::vector<double> start;
  std::vector<double> stop;
};

// BIO constraints over the 7-tag inventory: I-t may only follow B-t or I-t,
// and a sequence may not open with I-t.
bool bio_transition_allowed(Tag prev, Tag next);
bool bio_start_allowed(Tag tag);

struct ViterbiResult {
  TagSequence tags;
  double score = 0.0;
};

// Highest-scoring sequence for n x T emissions. Ties resolve to the lowest
// tag index at each backtrack step.
ViterbiResult viterbi_decode(std::span<const double> emissions, std::size_t n,
                             const CrfWeights& crf, bool constrain_bio);

}  // namespace jmie

#endif  // JMIE_CRF_HPP_
