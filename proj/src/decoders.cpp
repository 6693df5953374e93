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

#include "jmie/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "jmie/error.hpp"
#include "jmie/log.hpp"
#include "jmie/ops.hpp"

namespace jmie {

namespace {

constexpr int K = kNumRelationClasses;

void fill_uniform(ad::Parameter& p, Random& rng, double bound) {
  for (double& v : p.value) v = rng.uniform(-bound, bound);
}

double fan_in_bound(const ad::Parameter& p) {
  return 1.0 / std::sqrt(static_cast<double>(p.shape[0]));
}

ad::Tensor sum_all(ad::Tape& tape, const std::vector<ad::Tensor>& parts) {
  if (parts.empty()) return tape.scalar(0.0);
  ad::Tensor acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = ad::add(acc, parts[i]);
  return acc;
}

}  // namespace

std::string_view to_string(RelationMode mode) {
  return mode == RelationMode::kSoftmax ? "softmax" : "sigmoid";
}

std::optional<RelationMode> parse_relation_mode(std::string_view s) {
  if (s == "softmax") return RelationMode::kSoftmax;
  if (s == "sigmoid") return RelationMode::kSigmoid;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ConceptDecoder

ConceptDecoder::ConceptDecoder(std::size_t input_dim, ad::ParameterSet& params,
                               const std::string& prefix)
    : input_dim_(input_dim),
      w_(&params.add(prefix + ".w", {input_dim, static_cast<std::size_t>(kNumTags)})),
      b_(&params.add(prefix + ".b", {static_cast<std::size_t>(kNumTags)})),
      transitions_(&params.add(prefix + ".transitions",
                               {static_cast<std::size_t>(kNumTags), static_cast<std::size_t>(kNumTags)})),
      start_(&params.add(prefix + ".start", {static_cast<std::size_t>(kNumTags)})),
      stop_(&params.add(prefix + ".stop", {static_cast<std::size_t>(kNumTags)})) {}

void ConceptDecoder::init(Random& rng) {
  fill_uniform(*w_, rng, fan_in_bound(*w_));
  fill_uniform(*transitions_, rng, 0.1);
}

ad::Tensor ConceptDecoder::emissions(ad::Tape& tape, const ad::Tensor& x) const {
  if (x.rank() != 2 || x.shape()[1] != input_dim_) {
    throw Error(ErrorCode::kFeatureDimMismatch,
                "concept decoder expects width " + std::to_string(input_dim_) +
                    ", got " + ad::shape_string(x.shape()));
  }
  return ad::add(ad::matmul(x, tape.param(*w_)), tape.param(*b_));
}

CrfTensors ConceptDecoder::bind(ad::Tape& tape) const {
  return CrfTensors{tape.param(*transitions_), tape.param(*start_), tape.param(*stop_)};
}

CrfWeights ConceptDecoder::weights() const {
  return CrfWeights{static_cast<std::size_t>(kNumTags), transitions_->value, start_->value,
                    stop_->value};
}

ad::Tensor ConceptDecoder::nll(ad::Tape& tape, const ad::Tensor& x,
                               const TagSequence& gold) const {
  return crf_nll(emissions(tape, x), gold, bind(tape));
}

TagSequence ConceptDecoder::decode(const ad::Tensor& emissions, bool constrain_bio) const {
  return viterbi_decode(emissions.data(), emissions.shape()[0], weights(), constrain_bio).tags;
}

// ---------------------------------------------------------------------------
// LabelEmbeddings

LabelEmbeddings::LabelEmbeddings(std::size_t concept_dim, std::size_t assertion_dim,
                                 ad::ParameterSet& params, const std::string& prefix)
    : concept_(&params.add(prefix + ".concept", {static_cast<std::size_t>(kNumTags), concept_dim})),
      assertion_(&params.add(prefix + ".assertion",
                             {static_cast<std::size_t>(kNumAssertions + 1), assertion_dim})) {}

void LabelEmbeddings::init(Random& rng) {
  fill_uniform(*concept_, rng, 0.5);
  fill_uniform(*assertion_, rng, 0.5);
}

ad::Tensor LabelEmbeddings::concepts(ad::Tape& tape, const TagSequence& tags) const {
  return ad::gather_rows(tape, *concept_, tags, true);
}

ad::Tensor LabelEmbeddings::assertions(ad::Tape& tape, const std::vector<int>& labels) const {
  return ad::gather_rows(tape, *assertion_, labels, true);
}

// ---------------------------------------------------------------------------
// AssertionHead

AssertionHead::AssertionHead(std::size_t input_dim, std::size_t concept_dim,
                             ad::ParameterSet& params, const std::string& prefix)
    : input_dim_(input_dim),
      w_(&params.add(prefix + ".w", {input_dim + concept_dim, static_cast<std::size_t>(kNumAssertions)})),
      b_(&params.add(prefix + ".b", {static_cast<std::size_t>(kNumAssertions)})) {}

void AssertionHead::init(Random& rng) { fill_uniform(*w_, rng, fan_in_bound(*w_)); }

AssertionOutput AssertionHead::forward(ad::Tape& tape, const ad::Tensor& x,
                                       const ad::Tensor& concept_embedded,
                                       const std::vector<int>& heads,
                                       const std::vector<int>& gold_by_token) const {
  AssertionOutput out;
  out.heads = heads;
  if (heads.empty()) return out;
  if (x.shape()[1] + concept_embedded.shape()[1] != w_->shape[0]) {
    throw Error(ErrorCode::kFeatureDimMismatch, "assertion head input width");
  }
  for (int h : heads) {
    if (h < 0 || static_cast<std::size_t>(h) >= x.shape()[0] ||
        static_cast<std::size_t>(h) >= concept_embedded.shape()[0]) {
      throw Error(ErrorCode::kHeadOutOfRange, "head token " + std::to_string(h));
    }
  }
  const ad::Tensor features = ad::concat(
      {ad::embedding_lookup(x, heads), ad::embedding_lookup(concept_embedded, heads)}, 1);
  out.logits = ad::add(ad::matmul(features, tape.param(*w_)), tape.param(*b_));

  const auto logits = out.logits.data();
  std::vector<int> targets(heads.size(), 0);
  std::vector<double> row_mask(heads.size(), 0.0);
  for (std::size_t r = 0; r < heads.size(); ++r) {
    const double* row = logits.data() + r * kNumAssertions;
    const double mx = *std::max_element(row, row + kNumAssertions);
    std::vector<double> p(kNumAssertions);
    double z = 0.0;
    for (int c = 0; c < kNumAssertions; ++c) z += (p[static_cast<std::size_t>(c)] = std::exp(row[c] - mx));
    for (double& v : p) v /= z;
    out.probabilities.push_back(p);
    out.predicted.push_back(static_cast<Assertion>(std::max_element(row, row + kNumAssertions) - row));
    const std::size_t h = static_cast<std::size_t>(heads[r]);
    if (h < gold_by_token.size() && gold_by_token[h] >= 0) {
      targets[r] = gold_by_token[h];
      row_mask[r] = 1.0;
      ++out.loss_count;
    }
  }
  if (out.loss_count > 0) {
    out.loss_sum = ad::cross_entropy(out.logits, targets, row_mask, {}, ad::Reduction::kSum);
  }
  return out;
}

// ---------------------------------------------------------------------------
// RelationHead

RelationHead::RelationHead(std::size_t feature_dim, std::size_t scorer_dim,
                           ad::ParameterSet& params, const std::string& prefix)
    : feature_dim_(feature_dim),
      u_(&params.add(prefix + ".u", {feature_dim, scorer_dim})),
      v_(&params.add(prefix + ".v", {feature_dim, scorer_dim})),
      label_vectors_(&params.add(prefix + ".labels", {scorer_dim, static_cast<std::size_t>(K)})) {}

void RelationHead::init(Random& rng) {
  fill_uniform(*u_, rng, fan_in_bound(*u_));
  fill_uniform(*v_, rng, fan_in_bound(*v_));
  fill_uniform(*label_vectors_, rng, fan_in_bound(*label_vectors_));
}

std::vector<double> RelationHead::softmax_support(std::size_t padded, std::size_t length) {
  const std::size_t width = padded * K;
  std::vector<double> support(padded * width, 0.0);
  for (std::size_t i = 0; i < padded; ++i) {
    double* row = support.data() + i * width;
    if (i < length) {
      for (std::size_t j = 0; j < length; ++j) {
        if (j == i) continue;
        for (int k = 0; k < kNoLink; ++k) row[j * K + static_cast<std::size_t>(k)] = 1.0;
      }
    }
    row[i * K + kNoLink] = 1.0;
  }
  return support;
}

std::vector<int> softmax_relation_targets(const std::vector<TokenRelation>& gold,
                                          std::size_t length, std::size_t padded) {
  std::vector<int> targets(padded);
  for (std::size_t i = 0; i < padded; ++i) targets[i] = static_cast<int>(i) * K + kNoLink;
  std::vector<bool> set(padded, false);
  auto sorted = gold;
  std::sort(sorted.begin(), sorted.end(), [](const TokenRelation& a, const TokenRelation& b) {
    return std::tie(a.object_head, a.subject_head, a.label) <
           std::tie(b.object_head, b.subject_head, b.label);
  });
  for (const auto& g : sorted) {
    const auto i = static_cast<std::size_t>(g.object_head);
    if (i >= length || static_cast<std::size_t>(g.subject_head) >= length) {
      throw Error(ErrorCode::kHeadOutOfRange, "gold relation head outside sentence");
    }
    if (set[i]) continue;
    set[i] = true;
    targets[i] = g.subject_head * K + g.label;
  }
  return targets;
}

RelationOutput RelationHead::forward(ad::Tape& tape, const ad::Tensor& features,
                                     std::size_t length, RelationMode mode,
                                     const std::vector<TokenRelation>* gold,
                                     const std::vector<ConceptSpan>* decode_spans) const {
  if (features.rank() != 2 || features.shape()[1] != feature_dim_) {
    throw Error(ErrorCode::kFeatureDimMismatch,
                "relation head expects width " + std::to_string(feature_dim_) + ", got " +
                    ad::shape_string(features.shape()));
  }
  const std::size_t n = features.shape()[0];
  const std::size_t width = n * K;
  RelationOutput out;
  const ad::Tensor subject_side = ad::matmul(features, tape.param(*u_));
  const ad::Tensor object_side = ad::matmul(features, tape.param(*v_));
  const ad::Tensor hidden = ad::tanh(ad::pair_sum(subject_side, object_side));
  out.scores = ad::reshape(ad::matmul(hidden, tape.param(*label_vectors_)), {n, width});

  std::vector<double> support;
  if (mode == RelationMode::kSoftmax) support = softmax_support(n, length);

  if (gold != nullptr) {
    if (mode == RelationMode::kSoftmax) {
      const auto targets = softmax_relation_targets(*gold, length, n);
      std::vector<double> row_mask(n, 0.0);
      std::fill_n(row_mask.begin(), length, 1.0);
      out.loss_sum = ad::cross_entropy(out.scores, targets, row_mask, support, ad::Reduction::kSum);
      out.loss_count = length;
    } else {
      std::vector<double> targets(n * width, 0.0);
      std::vector<double> mask(n * width, 0.0);
      for (std::size_t i = 0; i < length; ++i) {
        for (std::size_t j = 0; j < length; ++j) {
          for (int k = 0; k < kNoLink; ++k) mask[i * width + j * K + static_cast<std::size_t>(k)] = 1.0;
        }
      }
      for (const auto& g : *gold) {
        targets[static_cast<std::size_t>(g.object_head) * width +
                static_cast<std::size_t>(g.subject_head) * K + static_cast<std::size_t>(g.label)] = 1.0;
      }
      out.loss_sum = ad::bce_with_logits(out.scores, targets, mask, ad::Reduction::kSum);
      out.loss_count = length * length * kNoLink;
    }
  }

  if (decode_spans != nullptr) {
    std::map<int, const ConceptSpan*> by_head;
    for (const auto& s : *decode_spans) by_head[s.head()] = &s;
    const auto scores = out.scores.data();
    for (const auto& [i, object] : by_head) {
      if (static_cast<std::size_t>(i) >= length) continue;
      const double* row = scores.data() + static_cast<std::size_t>(i) * width;
      auto emit = [&](std::size_t j, int k) {
        const auto subject = by_head.find(static_cast<int>(j));
        if (subject == by_head.end() || static_cast<int>(j) == i) return;
        out.triples.push_back(RelationTriple{*subject->second, static_cast<Relation>(k), *object});
      };
      if (mode == RelationMode::kSoftmax) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_cell = static_cast<std::size_t>(i) * K + kNoLink;
        for (std::size_t c = 0; c < width; ++c) {
          if (support[static_cast<std::size_t>(i) * width + c] != 0.0 && row[c] > best) {
            best = row[c];
            best_cell = c;
          }
        }
        const int k = static_cast<int>(best_cell % K);
        if (k != kNoLink) emit(best_cell / K, k);
      } else {
        for (std::size_t j = 0; j < length; ++j) {
          for (int k = 0; k < kNoLink; ++k) {
            if (row[j * K + static_cast<std::size_t>(k)] > 0.0) emit(j, k);
          }
        }
      }
    }
    out.triples = representable_triples(std::move(out.triples));
  }
  return out;
}

std::vector<RelationTriple> representable_triples(std::vector<RelationTriple> triples) {
  std::erase_if(triples, [](const RelationTriple& r) {
    return r.subject.ctype != relation_subject_type(r.label) ||
           r.object.ctype != relation_object_type(r.label) ||
           r.subject.same_extent(r.object);
  });
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return triples;
}

// ---------------------------------------------------------------------------
// Examples

std::vector<SentenceExample> make_examples(const Corpus& corpus, const Encoder& encoder,
                                           const PrecomputedEmbeddings* precomputed) {
  std::vector<SentenceExample> examples;
  std::size_t extra = 0;
  for (const auto& doc : corpus) {
    const auto grouped = group_by_sentence(doc);
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const Sentence& tokens = doc.sentences[s];
      if (tokens.empty()) continue;
      SentenceExample ex;
      ex.doc_id = doc.doc_id;
      ex.sent_index = static_cast<int>(s);
      ex.tokens = &tokens;
      ex.gold = grouped[s];
      ex.gold_tags = spans_to_bio(tokens.size(), ex.gold.concepts);
      ex.gold_assertions.assign(tokens.size(), -1);
      for (const auto& a : ex.gold.assertions) {
        ex.gold_assertions[static_cast<std::size_t>(a.span.head())] = static_cast<int>(a.label);
      }
      std::map<int, int> per_object;
      for (const auto& r : ex.gold.relations) {
        ex.gold_relations.push_back(
            TokenRelation{r.object.head(), r.subject.head(), static_cast<int>(r.label)});
        if (++per_object[r.object.head()] > 1) ++ex.extra_relations;
      }
      extra += ex.extra_relations;
      ex.input = encoder.prepare(doc.doc_id, ex.sent_index, tokens, precomputed);
      examples.push_back(std::move(ex));
    }
  }
  if (extra > 0) {
    log(LogLevel::kInfo, extra,
        " gold relation(s) share an object head with another; softmax mode keeps "
        "the smallest cell");
  }
  return examples;
}

// ---------------------------------------------------------------------------
// JointModel

struct JointModel::SentenceState {
  TagSequence used_tags;
  std::vector<ConceptSpan> used_spans;
  ad::Tensor emissions;
  ad::Tensor concept_loss;
  AssertionOutput assertion;
  std::vector<int> assertion_by_token;
  RelationOutput relation;
};

JointModel::JointModel(ModelConfig config, Vocabulary vocab)
    : config_(config),
      encoder_(config.encoder, std::move(vocab), params_, "enc"),
      concept_(encoder_.output_dim(), params_, "crf"),
      labels_(config.concept_dim, config.assertion_dim, params_, "labels"),
      assertion_(encoder_.output_dim(), config.concept_dim, params_, "assertion"),
      relation_(encoder_.output_dim() + config.concept_dim + config.assertion_dim,
                config.scorer_dim, params_, "relation") {}

void JointModel::init(std::uint64_t seed, const EmbeddingTable* pretrained) {
  Random rng(seed);
  encoder_.init(rng, pretrained);
  concept_.init(rng);
  labels_.init(rng);
  assertion_.init(rng);
  relation_.init(rng);
}

JointModel::SentenceState JointModel::run(ad::Tape& tape, const SentenceExample& ex,
                                          bool teacher_forcing, const GoldInjection& inject,
                                          const EncodeOptions& options, bool with_loss) const {
  SentenceState st;
  const std::size_t length = ex.input.length;
  const ad::Tensor x = encoder_.encode(tape, ex.input, options);
  const std::size_t padded = x.shape()[0];
  const ad::Tensor x_real = padded > length ? ad::slice(x, 0, 0, length) : x;
  st.emissions = concept_.emissions(tape, x_real);
  if (with_loss) {
    st.concept_loss = crf_nll(st.emissions, ex.gold_tags, concept_.bind(tape));
  }

  const bool gold_concepts = teacher_forcing || inject.concepts;
  st.used_tags = gold_concepts ? ex.gold_tags : concept_.decode(st.emissions, config_.constrain_bio);
  st.used_spans = bio_to_spans(st.used_tags, ex.sent_index);

  TagSequence padded_tags = st.used_tags;
  padded_tags.resize(padded, kTagO);
  const ad::Tensor concept_embedded = labels_.concepts(tape, padded_tags);

  std::map<int, int> gold_assertion_by_head;
  for (const auto& a : ex.gold.assertions) gold_assertion_by_head[a.span.head()] = static_cast<int>(a.label);
  auto gold_assertion_for = [&](const ConceptSpan& span) {
    for (const auto& a : ex.gold.assertions) {
      if (a.span.same_extent(span)) return static_cast<int>(a.label);
    }
    return -1;
  };

  std::vector<int> heads;
  std::vector<int> gold_by_token(length, -1);
  for (const auto& s : st.used_spans) {
    if (s.ctype != ConceptType::kProblem) continue;
    heads.push_back(s.head());
    gold_by_token[static_cast<std::size_t>(s.head())] = gold_assertion_for(s);
  }
  st.assertion = assertion_.forward(tape, x, concept_embedded, heads,
                                    with_loss ? gold_by_token : std::vector<int>{});

  const bool gold_assertions = teacher_forcing || inject.assertions;
  st.assertion_by_token.assign(padded, kAssertionNone);
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const int head = heads[h];
    const int gold = gold_by_token[static_cast<std::size_t>(head)];
    st.assertion_by_token[static_cast<std::size_t>(head)] =
        (gold_assertions && gold >= 0) ? gold : static_cast<int>(st.assertion.predicted[h]);
  }
  const ad::Tensor features =
      ad::concat({x, concept_embedded, labels_.assertions(tape, st.assertion_by_token)}, 1);
  st.relation = relation_.forward(tape, features, length, config_.relation_mode,
                                  with_loss ? &ex.gold_relations : nullptr, &st.used_spans);
  return st;
}

StageLosses JointModel::forward(ad::Tape& tape, const std::vector<const SentenceExample*>& batch,
                                bool teacher_forcing, const EncodeOptions& options,
                                Stage stage) const {
  std::vector<ad::Tensor> concept_parts;
  std::vector<ad::Tensor> assertion_parts;
  std::vector<ad::Tensor> relation_parts;
  std::size_t assertion_count = 0;
  std::size_t relation_count = 0;
  for (const SentenceExample* ex : batch) {
    SentenceState st = run(tape, *ex, teacher_forcing, {}, options, true);
    concept_parts.push_back(st.concept_loss);
    if (st.assertion.loss_count > 0) {
      assertion_parts.push_back(st.assertion.loss_sum);
      assertion_count += st.assertion.loss_count;
    }
    relation_parts.push_back(st.relation.loss_sum);
    relation_count += st.relation.loss_count;
  }
  auto mean = [&](const std::vector<ad::Tensor>& parts, std::size_t count) {
    if (count == 0) return tape.scalar(0.0);
    return ad::scale(sum_all(tape, parts), 1.0 / static_cast<double>(count));
  };
  StageLosses losses;
  losses.concept_loss = mean(concept_parts, batch.size());
  losses.assertion_loss = mean(assertion_parts, assertion_count);
  losses.relation_loss = mean(relation_parts, relation_count);
  switch (stage) {
    case Stage::kAll:
      losses.total = ad::add(ad::add(losses.concept_loss, losses.assertion_loss), losses.relation_loss);
      break;
    case Stage::kConcept: losses.total = losses.concept_loss; break;
    case Stage::kAssertion: losses.total = losses.assertion_loss; break;
    case Stage::kRelation: losses.total = losses.relation_loss; break;
  }
  return losses;
}

SentencePrediction JointModel::predict(const SentenceExample& example,
                                       const GoldInjection& inject) const {
  ad::Tape tape;
  const SentenceState st = run(tape, example, false, inject, {}, false);
  SentencePrediction pred;
  pred.doc_id = example.doc_id;
  pred.sent_index = example.sent_index;
  pred.tags = st.used_tags;
  pred.concepts = st.used_spans;
  for (const auto& s : st.used_spans) {
    if (s.ctype != ConceptType::kProblem) continue;
    pred.assertions.push_back(AssertionLabel{
        s, static_cast<Assertion>(st.assertion_by_token[static_cast<std::size_t>(s.head())])});
  }
  pred.relations = st.relation.triples;
  return pred;
}

std::string JointModel::debug_scores(const SentenceExample& example) const {
  ad::Tape tape;
  const SentenceState st = run(tape, example, false, {}, {}, false);
  nlohmann::json j;
  j["doc"] = example.doc_id;
  j["sent"] = example.sent_index;
  std::vector<std::string> tokens;
  for (const auto& t : *example.tokens) tokens.push_back(t.text);
  j["tokens"] = tokens;
  const std::size_t n = example.input.length;
  std::vector<std::vector<double>> emissions(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t < kNumTags; ++t) emissions[i].push_back(st.emissions.at(i, static_cast<std::size_t>(t)));
  }
  j["emissions"] = emissions;
  std::vector<std::string> tags;
  for (Tag t : st.used_tags) tags.emplace_back(tag_name(t));
  j["tags"] = tags;
  // relation_scores[i][j][k] = s(x_j, r_k, x_i)
  std::vector<std::vector<std::vector<double>>> rel(n, std::vector<std::vector<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t jj = 0; jj < n; ++jj) {
      for (int k = 0; k < K; ++k) rel[i][jj].push_back(st.relation.scores.at(i, jj * K + static_cast<std::size_t>(k)));
    }
  }
  j["relation_scores"] = rel;
  return j.dump();
}

}  // namespace jmie
