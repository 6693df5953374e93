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

#ifndef JMIE_TRAINER_HPP_
#define JMIE_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jmie/corpus.hpp"
#include "jmie/decoders.hpp"
#include "jmie/encoder.hpp"
#include "jmie/evaluation.hpp"
#include "jmie/pipeline.hpp"

namespace jmie {

enum class Arch { kJoint, kPipeline };
std::string_view to_string(Arch arch);
std::optional<Arch> parse_arch(std::string_view s);

struct TrainConfig {
  Arch arch = Arch::kJoint;
  EncoderMode encoder = EncoderMode::kTrainableLstm;
  RelationMode relation_mode = RelationMode::kSoftmax;
  double lr = 1e-3;
  std::size_t batch = 32;
  std::size_t hidden = 100;
  std::size_t concept_dim = 32;
  std::size_t assertion_dim = 32;
  // Width of trainable word vectors; replaced by the file's width when
  // pretrained vectors are given.
  std::size_t word_dim = 100;
  std::size_t precomputed_dim = 0;
  std::size_t scorer_dim = 128;
  std::size_t ffn_hidden = 128;
  double dropout = 0.1;
  double weight_decay = 0.01;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::uint64_t seed = 1;
  double dev_fraction = 0.1;
  bool teacher_forcing = true;
  bool constrain_bio = true;
  bool freeze_embeddings = false;
  bool unsafe_hparams = false;

  bool contextual() const { return encoder != EncoderMode::kTrainableLstm; }

  // Throws InvalidConfig. lr/batch/hidden/e_c/e_a must lie on the grids
  // (word-vector or contextual, by encoder mode) unless unsafe_hparams.
  void validate() const;

  // Flat key=value lines; '#' starts a comment. Unknown keys throw.
  void set(std::string_view key, std::string_view value);
  std::string to_text() const;
  static TrainConfig parse(std::string_view text);
  static TrainConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  ModelConfig model_config() const;
  PipelineConfig pipeline_config() const;
};

// Names of every config key, in to_text() order.
const std::vector<std::string>& train_config_keys();

struct TrainInputs {
  const EmbeddingTable* pretrained = nullptr;
  const PrecomputedEmbeddings* precomputed = nullptr;
  // Tokens of these corpora join the vocabulary when a pretrained vector
  // exists for them (e.g. the test set).
  std::vector<const Corpus*> vocabulary_corpora;
};

// Training-split tokens, plus extra tokens covered by pretrained vectors.
Vocabulary build_vocabulary(const Corpus& train, const TrainInputs& inputs);

// A trained joint model or pipeline with its config and vocabulary.
struct TrainedModel {
  TrainConfig config;
  Vocabulary vocab;
  std::unique_ptr<JointModel> joint;
  std::unique_ptr<PipelineModels> pipeline;

  const Encoder& encoder() const;
  SentencePrediction predict(const SentenceExample& example, const GoldInjection& inject) const;
  // Float32-rounds every parameter (what a checkpoint stores).
  void round_to_float32();
  void save(const std::filesystem::path& dir) const;
  static TrainedModel load(const std::filesystem::path& dir);
};

struct TrainResult {
  TrainedModel model;
  // One JSON object per line: per-epoch entries, then a final summary.
  std::vector<nlohmann::json> records;
  EvalReport dev_report;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  // Largest |total - (concept + assertion + relation)| seen on any batch.
  double additivity_residual = 0.0;
  double wall_seconds = 0.0;
};

TrainResult train(const Corpus& corpus, const TrainConfig& config, const TrainInputs& inputs = {});

// Predicted annotations for every document (same ids and sentences).
Corpus predict_corpus(const TrainedModel& model, const Corpus& corpus,
                      const PrecomputedEmbeddings* precomputed = nullptr,
                      const GoldInjection& inject = {}, int jobs = 1);

// Collects sentence predictions into documents shaped like the source.
Corpus assemble_predictions(const Corpus& source, const std::vector<SentencePrediction>& preds);

void write_run_records(const std::vector<nlohmann::json>& records,
                       const std::filesystem::path& path);

struct SeedsResult {
  std::vector<std::uint64_t> seeds;
  std::vector<EvalReport> reports;
  EvalReport mean;
};

// Trains once per seed and averages the evaluation F1s on test (or on
// the dev split when test is null).
SeedsResult run_seeds(const Corpus& corpus, const Corpus* test, const TrainConfig& config,
                      const std::vector<std::uint64_t>& seeds, const TrainInputs& inputs = {});

}  // namespace jmie

#endif  // JMIE_TRAINER_HPP_
