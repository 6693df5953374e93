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

#include "jmie/pipeline.hpp"

#include <cmath>
#include <map>

#include "jmie/ops.hpp"

namespace jmie {

namespace {

void fill_uniform(ad::Parameter& p, Random& rng, double bound) {
  for (double& v : p.value) v = rng.uniform(-bound, bound);
}

int gold_assertion(const SentenceExample& ex, const ConceptSpan& span) {
  for (const auto& a : ex.gold.assertions) {
    if (a.span.same_extent(span)) return static_cast<int>(a.label);
  }
  return -1;
}

std::vector<ConceptSpan> problems_of(const std::vector<ConceptSpan>& spans) {
  std::vector<ConceptSpan> out;
  for (const auto& s : spans) {
    if (s.ctype == ConceptType::kProblem) out.push_back(s);
  }
  return out;
}

std::vector<int> type_indices(const std::vector<ConceptSpan>& spans) {
  std::vector<int> out;
  for (const auto& s : spans) out.push_back(static_cast<int>(s.ctype));
  return out;
}

std::vector<int> gold_assertions_for(const SentenceExample& ex,
                                     const std::vector<ConceptSpan>& spans) {
  std::vector<int> out;
  for (const auto& s : spans) {
    const int g = gold_assertion(ex, s);
    out.push_back(g >= 0 ? g : kAssertionNone);
  }
  return out;
}

ad::Tensor mean_of(ad::Tape& tape, std::vector<ad::Tensor>& sums, std::size_t count) {
  if (count == 0) return tape.scalar(0.0);
  ad::Tensor acc = sums[0];
  for (std::size_t i = 1; i < sums.size(); ++i) acc = ad::add(acc, sums[i]);
  return ad::scale(acc, 1.0 / static_cast<double>(count));
}

}  // namespace

ad::Tensor span_representation(const ad::Tensor& x, const std::vector<ConceptSpan>& spans) {
  std::vector<std::pair<int, int>> ranges;
  for (const auto& s : spans) ranges.emplace_back(s.start_tok, s.end_tok);
  return ad::segment_sum(x, ranges);
}

FeedForward::FeedForward(std::size_t input_dim, std::size_t hidden, std::size_t classes,
                         ad::ParameterSet& params, const std::string& prefix)
    : w1_(&params.add(prefix + ".w1", {input_dim, hidden})),
      b1_(&params.add(prefix + ".b1", {hidden})),
      w2_(&params.add(prefix + ".w2", {hidden, classes})),
      b2_(&params.add(prefix + ".b2", {classes})) {}

void FeedForward::init(Random& rng) {
  fill_uniform(*w1_, rng, 1.0 / std::sqrt(static_cast<double>(w1_->shape[0])));
  fill_uniform(*w2_, rng, 1.0 / std::sqrt(static_cast<double>(w2_->shape[0])));
}

ad::Tensor FeedForward::forward(ad::Tape& tape, const ad::Tensor& x) const {
  const ad::Tensor h = ad::tanh(ad::add(ad::matmul(x, tape.param(*w1_)), tape.param(*b1_)));
  return ad::add(ad::matmul(h, tape.param(*w2_)), tape.param(*b2_));
}

// ---------------------------------------------------------------------------

PipelineConceptModel::PipelineConceptModel(const PipelineConfig& config, Vocabulary vocab)
    : config_(config),
      encoder_(config.encoder, std::move(vocab), params_, "enc"),
      crf_(encoder_.output_dim(), params_, "crf") {}

void PipelineConceptModel::init(std::uint64_t seed, const EmbeddingTable* pretrained) {
  Random rng(seed);
  encoder_.init(rng, pretrained);
  crf_.init(rng);
}

ad::Tensor PipelineConceptModel::loss(ad::Tape& tape,
                                      std::span<const SentenceExample* const> batch,
                                      const EncodeOptions& options) const {
  std::vector<ad::Tensor> sums;
  for (const SentenceExample* ex : batch) {
    ad::Tensor x = encoder_.encode(tape, ex->input, options);
    if (x.shape()[0] > ex->input.length) x = ad::slice(x, 0, 0, ex->input.length);
    sums.push_back(crf_.nll(tape, x, ex->gold_tags));
  }
  return mean_of(tape, sums, batch.size());
}

TagSequence PipelineConceptModel::decode(const SentenceExample& example) const {
  ad::Tape tape;
  ad::Tensor x = encoder_.encode(tape, example.input);
  if (x.shape()[0] > example.input.length) x = ad::slice(x, 0, 0, example.input.length);
  return crf_.decode(crf_.emissions(tape, x), config_.constrain_bio);
}

// ---------------------------------------------------------------------------

PipelineAssertionModel::PipelineAssertionModel(const PipelineConfig& config, Vocabulary vocab)
    : encoder_(config.encoder, std::move(vocab), params_, "enc"),
      types_(&params_.add("assertion.types", {kNumConceptTypes, config.type_dim})),
      ffn_(encoder_.output_dim() + config.type_dim, config.ffn_hidden, kNumAssertions, params_,
           "assertion.ffn") {}

void PipelineAssertionModel::init(std::uint64_t seed, const EmbeddingTable* pretrained) {
  Random rng(seed);
  encoder_.init(rng, pretrained);
  fill_uniform(*types_, rng, 0.5);
  ffn_.init(rng);
}

ad::Tensor PipelineAssertionModel::logits(ad::Tape& tape, const SentenceExample& example,
                                          const std::vector<ConceptSpan>& problems,
                                          const EncodeOptions& options) const {
  const ad::Tensor x = encoder_.encode(tape, example.input, options);
  const auto types = type_indices(problems);
  const ad::Tensor features = ad::concat(
      {span_representation(x, problems), ad::gather_rows(tape, *types_, types, true)}, 1);
  return ffn_.forward(tape, features);
}

ad::Tensor PipelineAssertionModel::loss(ad::Tape& tape,
                                        std::span<const SentenceExample* const> batch,
                                        const EncodeOptions& options) const {
  std::vector<ad::Tensor> sums;
  std::size_t count = 0;
  for (const SentenceExample* ex : batch) {
    const auto problems = problems_of(ex->gold.concepts);
    if (problems.empty()) continue;
    std::vector<int> targets;
    for (const auto& p : problems) targets.push_back(gold_assertion(*ex, p));
    std::vector<double> row_mask(targets.size(), 1.0);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (targets[i] < 0) {
        targets[i] = 0;
        row_mask[i] = 0.0;
      } else {
        ++count;
      }
    }
    sums.push_back(ad::cross_entropy(logits(tape, *ex, problems, options), targets, row_mask, {},
                                     ad::Reduction::kSum));
  }
  return mean_of(tape, sums, count);
}

std::vector<Assertion> PipelineAssertionModel::predict(
    const SentenceExample& example, const std::vector<ConceptSpan>& problems) const {
  std::vector<Assertion> out;
  if (problems.empty()) return out;
  ad::Tape tape;
  const ad::Tensor z = logits(tape, example, problems, {});
  for (std::size_t r = 0; r < problems.size(); ++r) {
    int best = 0;
    for (int c = 1; c < kNumAssertions; ++c) {
      if (z.at(r, static_cast<std::size_t>(c)) > z.at(r, static_cast<std::size_t>(best))) best = c;
    }
    out.push_back(static_cast<Assertion>(best));
  }
  return out;
}

// ---------------------------------------------------------------------------

PipelineRelationModel::PipelineRelationModel(const PipelineConfig& config, Vocabulary vocab)
    : encoder_(config.encoder, std::move(vocab), params_, "enc"),
      types_(&params_.add("relation.types", {kNumConceptTypes, config.type_dim})),
      assertions_(&params_.add("relation.assertions", {kNumAssertions + 1, config.assertion_dim})),
      ffn_(2 * (encoder_.output_dim() + config.type_dim + config.assertion_dim), config.ffn_hidden,
           kNumRelationClasses, params_, "relation.ffn") {}

void PipelineRelationModel::init(std::uint64_t seed, const EmbeddingTable* pretrained) {
  Random rng(seed);
  encoder_.init(rng, pretrained);
  fill_uniform(*types_, rng, 0.5);
  fill_uniform(*assertions_, rng, 0.5);
  ffn_.init(rng);
}

std::vector<std::pair<int, int>> PipelineRelationModel::ordered_pairs(std::size_t n) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return pairs;
}

ad::Tensor PipelineRelationModel::logits(ad::Tape& tape, const SentenceExample& example,
                                         const std::vector<ConceptSpan>& concepts,
                                         const std::vector<int>& assertions,
                                         const EncodeOptions& options) const {
  const ad::Tensor x = encoder_.encode(tape, example.input, options);
  const ad::Tensor per_concept = ad::concat(
      {span_representation(x, concepts), ad::gather_rows(tape, *types_, type_indices(concepts), true),
       ad::gather_rows(tape, *assertions_, assertions, true)},
      1);
  std::vector<int> subjects;
  std::vector<int> objects;
  for (const auto& [a, b] : ordered_pairs(concepts.size())) {
    subjects.push_back(a);
    objects.push_back(b);
  }
  const ad::Tensor features = ad::concat(
      {ad::embedding_lookup(per_concept, subjects), ad::embedding_lookup(per_concept, objects)}, 1);
  return ffn_.forward(tape, features);
}

ad::Tensor PipelineRelationModel::loss(ad::Tape& tape,
                                       std::span<const SentenceExample* const> batch,
                                       const EncodeOptions& options) const {
  std::vector<ad::Tensor> sums;
  std::size_t count = 0;
  for (const SentenceExample* ex : batch) {
    const auto& concepts = ex->gold.concepts;
    if (concepts.size() < 2) continue;
    std::map<std::pair<ConceptSpan, ConceptSpan>, int> gold;
    for (const auto& r : ex->gold.relations) {
      gold.try_emplace({r.subject, r.object}, static_cast<int>(r.label));
    }
    std::vector<int> targets;
    for (const auto& [a, b] : ordered_pairs(concepts.size())) {
      const auto it = gold.find({concepts[static_cast<std::size_t>(a)],
                                 concepts[static_cast<std::size_t>(b)]});
      targets.push_back(it == gold.end() ? kNoLink : it->second);
    }
    count += targets.size();
    sums.push_back(ad::cross_entropy(
        logits(tape, *ex, concepts, gold_assertions_for(*ex, concepts), options), targets, {}, {},
        ad::Reduction::kSum));
  }
  return mean_of(tape, sums, count);
}

std::vector<RelationTriple> PipelineRelationModel::predict(
    const SentenceExample& example, const std::vector<ConceptSpan>& concepts,
    const std::vector<int>& assertions) const {
  std::vector<RelationTriple> out;
  if (concepts.size() < 2) return out;
  ad::Tape tape;
  const ad::Tensor z = logits(tape, example, concepts, assertions, {});
  const auto pairs = ordered_pairs(concepts.size());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    int best = 0;
    for (int c = 1; c < kNumRelationClasses; ++c) {
      if (z.at(r, static_cast<std::size_t>(c)) > z.at(r, static_cast<std::size_t>(best))) best = c;
    }
    if (best == kNoLink) continue;
    out.push_back(RelationTriple{concepts[static_cast<std::size_t>(pairs[r].first)],
                                 static_cast<Relation>(best),
                                 concepts[static_cast<std::size_t>(pairs[r].second)]});
  }
  return representable_triples(std::move(out));
}

// ---------------------------------------------------------------------------

PipelineModels::PipelineModels(const PipelineConfig& cfg, const Vocabulary& vocab)
    : config(cfg),
      concept_model(std::make_unique<PipelineConceptModel>(cfg, vocab)),
      assertion_model(std::make_unique<PipelineAssertionModel>(cfg, vocab)),
      relation_model(std::make_unique<PipelineRelationModel>(cfg, vocab)) {}

void PipelineModels::init(std::uint64_t seed, const EmbeddingTable* pretrained) {
  concept_model->init(seed, pretrained);
  assertion_model->init(seed + 1, pretrained);
  relation_model->init(seed + 2, pretrained);
}

SentencePrediction predict_pipeline(const PipelineModels& models, const SentenceExample& example,
                                    const GoldInjection& inject) {
  SentencePrediction pred;
  pred.doc_id = example.doc_id;
  pred.sent_index = example.sent_index;
  pred.tags = inject.concepts ? example.gold_tags : models.concept_model->decode(example);
  pred.concepts = bio_to_spans(pred.tags, example.sent_index);

  const auto problems = problems_of(pred.concepts);
  const auto predicted = models.assertion_model->predict(example, problems);
  std::map<ConceptSpan, int> assertion_of;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    int label = static_cast<int>(predicted[i]);
    if (inject.assertions) {
      const int g = gold_assertion(example, problems[i]);
      if (g >= 0) label = g;
    }
    assertion_of[problems[i]] = label;
    pred.assertions.push_back(AssertionLabel{problems[i], static_cast<Assertion>(label)});
  }
  std::vector<int> assertions;
  for (const auto& c : pred.concepts) {
    const auto it = assertion_of.find(c);
    assertions.push_back(it == assertion_of.end() ? kAssertionNone : it->second);
  }
  pred.relations = models.relation_model->predict(example, pred.concepts, assertions);
  return pred;
}

}  // namespace jmie
