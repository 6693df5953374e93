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

#ifndef JMIE_ENCODER_HPP_
#define JMIE_ENCODER_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jmie/corpus.hpp"
#include "jmie/random.hpp"
#include "jmie/tensor.hpp"

namespace jmie {

// Token -> row map. Row 0 is <pad>, row 1 is <unk>; lookups of unknown
// tokens resolve to <unk>. Tokens are lowercased before lookup.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();

  static std::string normalize(std::string_view token);

  int add(std::string_view token);
  int lookup(std::string_view token) const;
  bool contains(std::string_view token) const;
  std::size_t size() const { return words_.size(); }
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }

  // One token per line, row order.
  std::string serialize() const;
  static Vocabulary parse(std::string_view text);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

// Word vectors with their vocabulary; matrix is |V| x dim, row-major.
struct EmbeddingTable {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<double> matrix;

  std::span<const double> row(int id) const {
    return std::span<const double>(matrix).subspan(static_cast<std::size_t>(id) * dim, dim);
  }
};

// Text vectors, one "token v1 ... vd" per line. d comes from the first
// line; <unk> is the mean of the loaded rows and <pad> is zero. Values are
// read as float32 and widened.
EmbeddingTable parse_word_vectors(std::string_view text);
EmbeddingTable load_word_vectors(const std::filesystem::path& path);

struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
};

// Contextual vectors per (document, sentence), read from "JEMB1" files:
//   magic "JEMB1", version u32, dim u32, doc count u32; per doc id length
//   u16 + UTF-8 id, sentence count u32; per sentence token count u32 then
//   n x d float32, all little-endian.
class PrecomputedEmbeddings {
 public:
  static constexpr std::uint32_t kVersion = 1;

  explicit PrecomputedEmbeddings(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t document_count() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  void add_document(const std::string& doc_id, std::vector<EmbeddingMatrix> sentences);
  // Throws MissingEmbeddingEntry, or TokenCountMismatch when the stored row
  // count differs from expected_tokens.
  const EmbeddingMatrix& get(const std::string& doc_id, int sent_index,
                             std::size_t expected_tokens) const;
  // Checks every sentence of the corpus up front.
  void check_against(const Corpus& corpus) const;

  std::string encode() const;
  static PrecomputedEmbeddings decode(std::string_view bytes);

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<EmbeddingMatrix>> docs_;
};

PrecomputedEmbeddings load_precomputed(const std::filesystem::path& path);
void save_precomputed(const PrecomputedEmbeddings& emb, const std::filesystem::path& path);

enum class EncoderMode { kTrainableLstm, kPrecomputed, kPrecomputedLstm };

std::string_view to_string(EncoderMode mode);
std::optional<EncoderMode> parse_encoder_mode(std::string_view s);

struct EncoderConfig {
  EncoderMode mode = EncoderMode::kTrainableLstm;
  std::size_t word_dim = 300;
  std::size_t hidden = 100;
  // Input width for the precomputed modes.
  std::size_t precomputed_dim = 0;
  double dropout = 0.1;
  bool freeze_embeddings = false;
};

// One sentence ready for encoding. Rows past the real length (padding) come
// out as zeros and never influence real rows.
struct EncoderInput {
  std::vector<int> token_ids;
  const EmbeddingMatrix* vectors = nullptr;
  std::size_t length = 0;
  std::size_t padded_length = 0;
};

struct EncodeOptions {
  bool train = false;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
};

// Token encoder: trainable embeddings + BiLSTM, raw precomputed vectors, or
// precomputed vectors + BiLSTM. Parameters live in the caller's set under
// "<prefix>.".
class Encoder {
 public:
  Encoder(EncoderConfig config, Vocabulary vocab, ad::ParameterSet& params,
          const std::string& prefix);

  const EncoderConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  std::size_t input_dim() const;
  std::size_t output_dim() const;

  // LSTM weights ~ U(-1/sqrt(h), 1/sqrt(h)); embedding rows copied from
  // pretrained where available, otherwise ~ U(-0.1, 0.1). <pad> stays zero.
  void init(Random& rng, const EmbeddingTable* pretrained = nullptr);

  EncoderInput prepare(const std::string& doc_id, int sent_index,
                       const Sentence& tokens,
                       const PrecomputedEmbeddings* precomputed,
                       std::size_t padded_length = 0) const;

  ad::Tensor encode(ad::Tape& tape, const EncoderInput& input,
                    const EncodeOptions& options = {}) const;

  // Clears gradients that must not move parameters (the <pad> row).
  void mask_gradients() const;

 private:
  struct Direction {
    ad::Parameter* w_ih = nullptr;
    ad::Parameter* w_hh = nullptr;
    ad::Parameter* bias = nullptr;
  };

  ad::Tensor run_direction(ad::Tape& tape, const ad::Tensor& inputs,
                           const Direction& dir, bool reverse) const;

  EncoderConfig config_;
  Vocabulary vocab_;
  ad::Parameter* embedding_ = nullptr;
  Direction forward_;
  Direction backward_;
};

}  // namespace jmie

#endif  // JMIE_ENCODER_HPP_
