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

#ifndef JMIE_DECODERS_HPP_
#define JMIE_DECODERS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jmie/corpus.hpp"
#include "jmie/crf.hpp"
#include "jmie/encoder.hpp"
#include "jmie/tensor.hpp"

namespace jmie {

enum class RelationMode { kSoftmax, kSigmoid };
std::string_view to_string(RelationMode mode);
std::optional<RelationMode> parse_relation_mode(std::string_view s);

// Emission projection plus CRF transition/start/stop scores over the BIO tags.
class ConceptDecoder {
 public:
  ConceptDecoder(std::size_t input_dim, ad::ParameterSet& params, const std::string& prefix);

  void init(Random& rng);
  ad::Tensor emissions(ad::Tape& tape, const ad::Tensor& x) const;
  CrfTensors bind(ad::Tape& tape) const;
  CrfWeights weights() const;

  ad::Tensor nll(ad::Tape& tape, const ad::Tensor& x, const TagSequence& gold) const;
  TagSequence decode(const ad::Tensor& emissions, bool constrain_bio) const;

 private:
  std::size_t input_dim_;
  ad::Parameter* w_;
  ad::Parameter* b_;
  ad::Parameter* transitions_;
  ad::Parameter* start_;
  ad::Parameter* stop_;
};

// Concept-tag table CE (7 rows) and assertion table AE (6 labels + none).
class LabelEmbeddings {
 public:
  LabelEmbeddings(std::size_t concept_dim, std::size_t assertion_dim,
                  ad::ParameterSet& params, const std::string& prefix);
  void init(Random& rng);

  std::size_t concept_dim() const { return concept_->shape[1]; }
  std::size_t assertion_dim() const { return assertion_->shape[1]; }
  ad::Tensor concepts(ad::Tape& tape, const TagSequence& tags) const;
  // Entries are assertion indices or kAssertionNone.
  ad::Tensor assertions(ad::Tape& tape, const std::vector<int>& labels) const;

 private:
  ad::Parameter* concept_;
  ad::Parameter* assertion_;
};

struct AssertionOutput {
  std::vector<int> heads;
  ad::Tensor logits;  // heads x 6 (invalid when there are no heads)
  std::vector<std::vector<double>> probabilities;
  std::vector<Assertion> predicted;
  ad::Tensor loss_sum;  // summed cross-entropy over heads with gold labels
  std::size_t loss_count = 0;
};

// softmax(W [X_i ; CE(tag_i)] + b) at problem head tokens.
class AssertionHead {
 public:
  AssertionHead(std::size_t input_dim, std::size_t concept_dim,
                ad::ParameterSet& params, const std::string& prefix);
  void init(Random& rng);

  // gold_by_token[i] is the gold assertion index at token i or -1.
  AssertionOutput forward(ad::Tape& tape, const ad::Tensor& x,
                          const ad::Tensor& concept_embedded,
                          const std::vector<int>& heads,
                          const std::vector<int>& gold_by_token) const;

 private:
  std::size_t input_dim_;
  ad::Parameter* w_;
  ad::Parameter* b_;
};

// Token-level gold relation cells: subject head j and relation k for the
// object head token i.
struct TokenRelation {
  int object_head = 0;
  int subject_head = 0;
  int label = 0;
};

struct RelationOutput {
  // n x (n*K) scores s(x_j, r_k, x_i), row i, column j*K + k.
  ad::Tensor scores;
  ad::Tensor loss_sum;
  std::size_t loss_count = 0;
  std::vector<RelationTriple> triples;
};

// Multi-head selection scorer s(x_j, r_k, x_i) = u_k . tanh(U f_j + V f_i)
// with f = [X ; CE(tag) ; AE(assertion)].
class RelationHead {
 public:
  static constexpr int kClasses = kNumRelationClasses;

  RelationHead(std::size_t feature_dim, std::size_t scorer_dim,
               ad::ParameterSet& params, const std::string& prefix);
  void init(Random& rng);
  std::size_t feature_dim() const { return feature_dim_; }

  // Softmax mode normalizes row i over every (j, k != nolink) cell with
  // j < length, j != i, plus the single (i, nolink) cell: n*K - (K - 1)
  // cells for K real labels.
  static std::vector<double> softmax_support(std::size_t padded, std::size_t length);

  // features: padded x F. Rows at or past length are padding. Gold cells
  // are optional (loss_sum stays invalid without them). decode_spans are
  // the concept spans used to turn token decisions into triples.
  RelationOutput forward(ad::Tape& tape, const ad::Tensor& features, std::size_t length,
                         RelationMode mode, const std::vector<TokenRelation>* gold,
                         const std::vector<ConceptSpan>* decode_spans) const;

 private:
  std::size_t feature_dim_;
  ad::Parameter* u_;
  ad::Parameter* v_;
  ad::Parameter* label_vectors_;
};

struct ModelConfig {
  EncoderConfig encoder;
  std::size_t concept_dim = 32;
  std::size_t assertion_dim = 32;
  std::size_t scorer_dim = 128;
  RelationMode relation_mode = RelationMode::kSoftmax;
  bool constrain_bio = true;
};

// A sentence with its gold annotations in token-level form.
struct SentenceExample {
  std::string doc_id;
  int sent_index = 0;
  const Sentence* tokens = nullptr;
  SentenceAnnotations gold;
  TagSequence gold_tags;
  // Gold assertion index at problem head tokens, -1 elsewhere.
  std::vector<int> gold_assertions;
  std::vector<TokenRelation> gold_relations;
  // Object heads that headed more than one gold relation (softmax mode
  // keeps the lexicographically smallest cell).
  std::size_t extra_relations = 0;
  EncoderInput input;
};

// Builds examples for every non-empty sentence of the corpus.
std::vector<SentenceExample> make_examples(const Corpus& corpus, const Encoder& encoder,
                                           const PrecomputedEmbeddings* precomputed);

// Softmax-mode target cell per token: (subject head, label) for object heads,
// (self, nolink) otherwise.
std::vector<int> softmax_relation_targets(const std::vector<TokenRelation>& gold,
                                          std::size_t length, std::size_t padded);

struct StageLosses {
  ad::Tensor concept_loss;
  ad::Tensor assertion_loss;
  ad::Tensor relation_loss;
  ad::Tensor total;
};

struct SentencePrediction {
  std::string doc_id;
  int sent_index = 0;
  TagSequence tags;
  std::vector<ConceptSpan> concepts;
  std::vector<AssertionLabel> assertions;
  std::vector<RelationTriple> relations;
};

// Which stage inputs come from gold annotations instead of predictions.
struct GoldInjection {
  bool concepts = false;
  bool assertions = false;
};

enum class Stage { kAll, kConcept, kAssertion, kRelation };

// Shared encoder with the three stacked decoders.
class JointModel {
 public:
  JointModel(ModelConfig config, Vocabulary vocab);
  JointModel(const JointModel&) = delete;
  JointModel& operator=(const JointModel&) = delete;

  const ModelConfig& config() const { return config_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  const Encoder& encoder() const { return encoder_; }

  // Encoder and CRF first, so a pipeline concept model built from the same
  // seed starts from the same values.
  void init(std::uint64_t seed, const EmbeddingTable* pretrained = nullptr);

  // Stage losses for a batch, each a per-batch mean, on one tape. With
  // teacher forcing the label embeddings see gold tags and assertions,
  // otherwise Viterbi and argmax predictions. stage selects which loss goes
  // into total (kAll: the sum of all three).
  StageLosses forward(ad::Tape& tape, const std::vector<const SentenceExample*>& batch,
                      bool teacher_forcing, const EncodeOptions& options,
                      Stage stage = Stage::kAll) const;

  SentencePrediction predict(const SentenceExample& example,
                             const GoldInjection& inject = {}) const;
  // Per-sentence score dump (emissions, tags, relation scores) as one JSON
  // object on a single line.
  std::string debug_scores(const SentenceExample& example) const;

  void mask_gradients() const { encoder_.mask_gradients(); }

 private:
  struct SentenceState;
  SentenceState run(ad::Tape& tape, const SentenceExample& ex, bool teacher_forcing,
                    const GoldInjection& inject, const EncodeOptions& options,
                    bool with_loss) const;

  ModelConfig config_;
  ad::ParameterSet params_;
  Encoder encoder_;
  ConceptDecoder concept_;
  LabelEmbeddings labels_;
  AssertionHead assertion_;
  RelationHead relation_;
};

// Keeps triples whose label fits the (subject, object) concept types.
std::vector<RelationTriple> representable_triples(std::vector<RelationTriple> triples);

}  // namespace jmie

#endif  // JMIE_DECODERS_HPP_
