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

#include "jmie/crf.hpp"

#include <limits>
#include <string>

#include "jmie/error.hpp"
#include "jmie/ops.hpp"

namespace jmie {

namespace {

void check_lengths(const ad::Tensor& emissions, std::size_t n_tags) {
  if (emissions.rank() != 2 || emissions.shape()[0] != n_tags) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(n_tags) + " tags for emissions of shape " +
                    ad::shape_string(emissions.shape()));
  }
}

}  // namespace

ad::Tensor crf_sequence_score(const ad::Tensor& emissions, const TagSequence& tags,
                              const CrfTensors& crf) {
  check_lengths(emissions, tags.size());
  if (tags.empty()) return emissions.tape().scalar(0.0);
  const std::size_t n_tags = emissions.shape()[1];
  std::vector<std::size_t> emit_idx;
  std::vector<std::size_t> trans_idx;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    emit_idx.push_back(i * n_tags + static_cast<std::size_t>(tags[i]));
    if (i > 0) {
      trans_idx.push_back(static_cast<std::size_t>(tags[i - 1]) * n_tags +
                          static_cast<std::size_t>(tags[i]));
    }
  }
  const std::size_t first = static_cast<std::size_t>(tags.front());
  const std::size_t last = static_cast<std::size_t>(tags.back());
  ad::Tensor score = ad::add(ad::sum(ad::pick(crf.start, std::span(&first, 1))),
                             ad::sum(ad::pick(emissions, emit_idx)));
  if (!trans_idx.empty()) score = ad::add(score, ad::sum(ad::pick(crf.transitions, trans_idx)));
  return ad::add(score, ad::sum(ad::pick(crf.stop, std::span(&last, 1))));
}

ad::Tensor crf_log_partition(const ad::Tensor& emissions, const CrfTensors& crf) {
  const std::size_t n = emissions.shape()[0];
  if (n == 0) throw Error(ErrorCode::kLengthMismatch, "empty sequence");
  // alpha_t[j] = logsumexp_i(alpha_{t-1}[i] + A[i, j]) + emit_t[j]; the
  // transposed transition matrix plus alpha as a bias puts A[i, j] + alpha[i]
  // at (j, i).
  const ad::Tensor transposed = ad::transpose(crf.transitions);
  ad::Tensor alpha = ad::add(crf.start, ad::row(emissions, 0));
  for (std::size_t t = 1; t < n; ++t) {
    alpha = ad::add(ad::logsumexp(ad::add(transposed, alpha), 1), ad::row(emissions, t));
  }
  return ad::logsumexp(ad::add(alpha, crf.stop), 0);
}

ad::Tensor crf_nll(const ad::Tensor& emissions, const TagSequence& tags,
                   const CrfTensors& crf) {
  check_lengths(emissions, tags.size());
  return ad::sub(crf_log_partition(emissions, crf), crf_sequence_score(emissions, tags, crf));
}

bool bio_transition_allowed(Tag prev, Tag next) {
  if (!is_inside(next)) return true;
  return prev != kTagO && tag_type(prev) == tag_type(next);
}

bool bio_start_allowed(Tag tag) { return !is_inside(tag); }

ViterbiResult viterbi_decode(std::span<const double> emissions, std::size_t n,
                             const CrfWeights& crf, bool constrain_bio) {
  const std::size_t T = crf.num_tags;
  if (n == 0) return {};
  if (emissions.size() != n * T) {
    throw Error(ErrorCode::kLengthMismatch, "emission matrix does not match n x T");
  }
  if (constrain_bio && T != static_cast<std::size_t>(kNumTags)) {
    throw Error(ErrorCode::kLengthMismatch, "BIO constraints need the 7-tag inventory");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto trans = [&](std::size_t i, std::size_t j) {
    if (constrain_bio && !bio_transition_allowed(static_cast<Tag>(i), static_cast<Tag>(j))) {
      return kNegInf;
    }
    return crf.transitions[i * T + j];
  };
  std::vector<double> score(T);
  for (std::size_t j = 0; j < T; ++j) {
    score[j] = (constrain_bio && !bio_start_allowed(static_cast<Tag>(j)))
                   ? kNegInf
                   : crf.start[j] + emissions[j];
  }
  std::vector<std::size_t> back(n * T, 0);
  std::vector<double> next(T);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t j = 0; j < T; ++j) {
      double best = kNegInf;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < T; ++i) {
        const double s = score[i] + trans(i, j);
        if (s > best) {
          best = s;
          arg = i;
        }
      }
      next[j] = best + emissions[t * T + j];
      back[t * T + j] = arg;
    }
    score.swap(next);
  }
  double best = kNegInf;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < T; ++j) {
    const double s = score[j] + crf.stop[j];
    if (s > best) {
      best = s;
      arg = j;
    }
  }
  ViterbiResult result;
  result.score = best;
  result.tags.assign(n, kTagO);
  for (std::size_t t = n; t-- > 0;) {
    result.tags[t] = static_cast<Tag>(arg);
    if (t > 0) arg = back[t * T + arg];
  }
  return result;
}

}  // namespace jmie
