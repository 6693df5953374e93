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

#ifndef JMIE_PIPELINE_HPP_
#define JMIE_PIPELINE_HPP_

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jmie/decoders.hpp"
#include "jmie/encoder.hpp"
#include "jmie/tensor.hpp"

namespace jmie {

struct PipelineConfig {
  EncoderConfig encoder;
  std::size_t type_dim = 32;
  std::size_t assertion_dim = 32;
  std::size_t ffn_hidden = 128;
  bool constrain_bio = true;
};

// Rows are the element sums of x over each span's token range.
ad::Tensor span_representation(const ad::Tensor& x, const std::vector<ConceptSpan>& spans);

// One hidden tanh layer.
class FeedForward {
 public:
  FeedForward(std::size_t input_dim, std::size_t hidden, std::size_t classes,
              ad::ParameterSet& params, const std::string& prefix);
  void init(Random& rng);
  ad::Tensor forward(ad::Tape& tape, const ad::Tensor& x) const;

 private:
  ad::Parameter* w1_;
  ad::Parameter* b1_;
  ad::Parameter* w2_;
  ad::Parameter* b2_;
};

// Encoder + CRF trained alone. Parameter names and initialization order
// match the joint model's concept stage.
class PipelineConceptModel {
 public:
  PipelineConceptModel(const PipelineConfig& config, Vocabulary vocab);
  PipelineConceptModel(const PipelineConceptModel&) = delete;
  PipelineConceptModel& operator=(const PipelineConceptModel&) = delete;

  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  const Encoder& encoder() const { return encoder_; }
  void init(std::uint64_t seed, const EmbeddingTable* pretrained = nullptr);

  // Mean sentence NLL over the batch.
  ad::Tensor loss(ad::Tape& tape, std::span<const SentenceExample* const> batch,
                  const EncodeOptions& options) const;
  TagSequence decode(const SentenceExample& example) const;
  void mask_gradients() const { encoder_.mask_gradients(); }

 private:
  PipelineConfig config_;
  ad::ParameterSet params_;
  Encoder encoder_;
  ConceptDecoder crf_;
};

// Classifier over [span sum ; type embedding] for problem concepts.
class PipelineAssertionModel {
 public:
  PipelineAssertionModel(const PipelineConfig& config, Vocabulary vocab);
  PipelineAssertionModel(const PipelineAssertionModel&) = delete;
  PipelineAssertionModel& operator=(const PipelineAssertionModel&) = delete;

  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  void init(std::uint64_t seed, const EmbeddingTable* pretrained = nullptr);

  // Mean cross-entropy over gold problem concepts (0 when the batch has none).
  ad::Tensor loss(ad::Tape& tape, std::span<const SentenceExample* const> batch,
                  const EncodeOptions& options) const;
  // One label per problem span, in order.
  std::vector<Assertion> predict(const SentenceExample& example,
                                 const std::vector<ConceptSpan>& problems) const;
  void mask_gradients() const { encoder_.mask_gradients(); }

 private:
  ad::Tensor logits(ad::Tape& tape, const SentenceExample& example,
                    const std::vector<ConceptSpan>& problems, const EncodeOptions& options) const;

  ad::ParameterSet params_;
  Encoder encoder_;
  ad::Parameter* types_;
  FeedForward ffn_;
};

// Classifier over every ordered concept pair (subject, object) with the
// features [span ; type ; assertion] of both sides and a nolink class.
class PipelineRelationModel {
 public:
  PipelineRelationModel(const PipelineConfig& config, Vocabulary vocab);
  PipelineRelationModel(const PipelineRelationModel&) = delete;
  PipelineRelationModel& operator=(const PipelineRelationModel&) = delete;

  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  void init(std::uint64_t seed, const EmbeddingTable* pretrained = nullptr);

  // Mean cross-entropy over all ordered pairs of gold concepts.
  ad::Tensor loss(ad::Tape& tape, std::span<const SentenceExample* const> batch,
                  const EncodeOptions& options) const;
  // assertions[c] is the label of concepts[c] or kAssertionNone.
  std::vector<RelationTriple> predict(const SentenceExample& example,
                                      const std::vector<ConceptSpan>& concepts,
                                      const std::vector<int>& assertions) const;
  void mask_gradients() const { encoder_.mask_gradients(); }

  // Ordered pairs (a, b), a != b, in row-major order.
  static std::vector<std::pair<int, int>> ordered_pairs(std::size_t n);

 private:
  ad::Tensor logits(ad::Tape& tape, const SentenceExample& example,
                    const std::vector<ConceptSpan>& concepts, const std::vector<int>& assertions,
                    const EncodeOptions& options) const;

  ad::ParameterSet params_;
  Encoder encoder_;
  ad::Parameter* types_;
  ad::Parameter* assertions_;
  FeedForward ffn_;
};

struct PipelineModels {
  PipelineConfig config;
  std::unique_ptr<PipelineConceptModel> concept_model;
  std::unique_ptr<PipelineAssertionModel> assertion_model;
  std::unique_ptr<PipelineRelationModel> relation_model;

  PipelineModels(const PipelineConfig& config, const Vocabulary& vocab);
  void init(std::uint64_t seed, const EmbeddingTable* pretrained = nullptr);
};

// Stage 2 sees stage-1 predictions and stage 3 sees stages 1-2 unless the
// injection flags substitute the reference annotations.
SentencePrediction predict_pipeline(const PipelineModels& models, const SentenceExample& example,
                                    const GoldInjection& inject = {});

}  // namespace jmie

#endif  // JMIE_PIPELINE_HPP_
