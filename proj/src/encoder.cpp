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

#include "jmie/encoder.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "jmie/binary_io.hpp"
#include "jmie/error.hpp"
#include "jmie/ops.hpp"

namespace jmie {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kJembMagic = "JEMB1";

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

float parse_float(std::string_view s, std::size_t line_no) {
  const std::string tmp(s);
  char* end = nullptr;
  const float v = std::strtof(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) {
    throw Error(ErrorCode::kRaggedLine,
                "line " + std::to_string(line_no) + ": bad number '" + tmp + "'");
  }
  return v;
}

}  // namespace

Vocabulary::Vocabulary() {
  words_ = {"<pad>", "<unk>"};
  index_ = {{"<pad>", kPad}, {"<unk>", kUnk}};
}

std::string Vocabulary::normalize(std::string_view token) {
  std::string out(token);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

int Vocabulary::add(std::string_view token) {
  std::string key = normalize(token);
  const auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(words_.size());
  index_.emplace(key, id);
  words_.push_back(std::move(key));
  return id;
}

int Vocabulary::lookup(std::string_view token) const {
  const auto it = index_.find(normalize(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(normalize(token)) > 0;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (const auto& w : words_) out += w + "\n";
  return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary vocab;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view word = text.substr(pos, end - pos);
    // The first two lines are the reserved <pad> and <unk> rows.
    if (line_no >= 2 && !word.empty()) vocab.add(word);
    ++line_no;
    pos = end + 1;
  }
  return vocab;
}

EmbeddingTable parse_word_vectors(std::string_view text) {
  std::vector<std::string> words;
  std::vector<float> values;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = tokenize(line);
    if (fields.empty()) continue;
    if (dim == 0) {
      if (fields.size() < 2) {
        throw Error(ErrorCode::kRaggedLine, "line 1 has no vector values");
      }
      dim = fields.size() - 1;
    }
    if (fields.size() != dim + 1) {
      throw Error(ErrorCode::kRaggedLine,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size() - 1) + " values, expected " +
                      std::to_string(dim));
    }
    words.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      values.push_back(parse_float(fields[k], line_no));
    }
  }
  if (words.empty()) throw Error(ErrorCode::kEmptyFile, "no word vectors found");

  EmbeddingTable table;
  table.dim = dim;
  std::vector<int> rows;
  for (const auto& w : words) rows.push_back(table.vocab.add(w));
  table.matrix.assign(table.vocab.size() * dim, 0.0);
  std::vector<double> mean(dim, 0.0);
  for (std::size_t r = 0; r < words.size(); ++r) {
    double* dst = table.matrix.data() + static_cast<std::size_t>(rows[r]) * dim;
    for (std::size_t c = 0; c < dim; ++c) {
      dst[c] = static_cast<double>(values[r * dim + c]);
      mean[c] += dst[c];
    }
  }
  for (std::size_t c = 0; c < dim; ++c) {
    table.matrix[static_cast<std::size_t>(Vocabulary::kUnk) * dim + c] =
        mean[c] / static_cast<double>(words.size());
  }
  return table;
}

EmbeddingTable load_word_vectors(const fs::path& path) {
  return parse_word_vectors(read_all(path));
}

void PrecomputedEmbeddings::add_document(const std::string& doc_id,
                                         std::vector<EmbeddingMatrix> sentences) {
  for (const auto& m : sentences) {
    if (m.rows > 0 && m.cols != dim_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  doc_id + ": vectors of width " + std::to_string(m.cols) +
                      " in a file of width " + std::to_string(dim_));
    }
    if (m.data.size() != m.rows * m.cols) {
      throw Error(ErrorCode::kDimensionMismatch, doc_id + ": ragged matrix");
    }
  }
  docs_[doc_id] = std::move(sentences);
}

const EmbeddingMatrix& PrecomputedEmbeddings::get(const std::string& doc_id,
                                                  int sent_index,
                                                  std::size_t expected_tokens) const {
  const auto it = docs_.find(doc_id);
  if (it == docs_.end() || sent_index < 0 ||
      static_cast<std::size_t>(sent_index) >= it->second.size()) {
    throw Error(ErrorCode::kMissingEmbeddingEntry,
                "no vectors for " + doc_id + " sentence " + std::to_string(sent_index));
  }
  const EmbeddingMatrix& m = it->second[static_cast<std::size_t>(sent_index)];
  if (m.rows != expected_tokens) {
    throw Error(ErrorCode::kTokenCountMismatch,
                doc_id + " sentence " + std::to_string(sent_index) + ": file has " +
                    std::to_string(m.rows) + " token vectors, corpus has " +
                    std::to_string(expected_tokens) + " tokens");
  }
  return m;
}

void PrecomputedEmbeddings::check_against(const Corpus& corpus) const {
  for (const auto& doc : corpus) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      get(doc.doc_id, static_cast<int>(s), doc.sentences[s].size());
    }
  }
}

std::string PrecomputedEmbeddings::encode() const {
  io::ByteWriter w;
  w.bytes(kJembMagic);
  w.le<std::uint32_t>(kVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(dim_));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(docs_.size()));
  for (const auto& [id, sentences] : docs_) {
    w.le<std::uint16_t>(static_cast<std::uint16_t>(id.size()));
    w.bytes(id);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(sentences.size()));
    for (const auto& m : sentences) {
      w.le<std::uint32_t>(static_cast<std::uint32_t>(m.rows));
      for (double v : m.data) w.f32(static_cast<float>(v));
    }
  }
  return w.take();
}

PrecomputedEmbeddings PrecomputedEmbeddings::decode(std::string_view bytes) {
  io::ByteReader r(bytes, "JEMB1 file");
  if (bytes.size() < kJembMagic.size() || r.bytes(kJembMagic.size()) != kJembMagic) {
    throw Error(ErrorCode::kBadMagic, "not a JEMB1 embedding file");
  }
  const auto version = r.le<std::uint32_t>();
  if (version != kVersion) {
    throw Error(ErrorCode::kIo, "unsupported JEMB1 version " + std::to_string(version));
  }
  const auto dim = r.le<std::uint32_t>();
  const auto n_docs = r.le<std::uint32_t>();
  PrecomputedEmbeddings emb(dim);
  for (std::uint32_t d = 0; d < n_docs; ++d) {
    const auto id_len = r.le<std::uint16_t>();
    std::string id(r.bytes(id_len));
    const auto n_sent = r.le<std::uint32_t>();
    std::vector<EmbeddingMatrix> sentences;
    for (std::uint32_t s = 0; s < n_sent; ++s) {
      EmbeddingMatrix m;
      m.rows = r.le<std::uint32_t>();
      m.cols = dim;
      m.data.resize(m.rows * m.cols);
      for (double& v : m.data) v = static_cast<double>(r.f32());
      sentences.push_back(std::move(m));
    }
    emb.add_document(id, std::move(sentences));
  }
  if (!r.done()) throw Error(ErrorCode::kIo, "trailing bytes in JEMB1 file");
  return emb;
}

PrecomputedEmbeddings load_precomputed(const fs::path& path) {
  return PrecomputedEmbeddings::decode(read_all(path));
}

void save_precomputed(const PrecomputedEmbeddings& emb, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << emb.encode();
}

std::string_view to_string(EncoderMode mode) {
  switch (mode) {
    case EncoderMode::kTrainableLstm: return "lstm";
    case EncoderMode::kPrecomputed: return "precomputed";
    case EncoderMode::kPrecomputedLstm: return "precomputed+lstm";
  }
  return "lstm";
}

std::optional<EncoderMode> parse_encoder_mode(std::string_view s) {
  if (s == "lstm" || s == "trainable_lstm") return EncoderMode::kTrainableLstm;
  if (s == "precomputed") return EncoderMode::kPrecomputed;
  if (s == "precomputed+lstm") return EncoderMode::kPrecomputedLstm;
  return std::nullopt;
}

Encoder::Encoder(EncoderConfig config, Vocabulary vocab, ad::ParameterSet& params,
                 const std::string& prefix)
    : config_(config), vocab_(std::move(vocab)) {
  if (config_.mode != EncoderMode::kTrainableLstm && config_.precomputed_dim == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "precomputed modes need the vector width");
  }
  if (config_.mode == EncoderMode::kTrainableLstm) {
    embedding_ = &params.add(prefix + ".embed", {vocab_.size(), config_.word_dim});
    embedding_->trainable = !config_.freeze_embeddings;
  }
  if (config_.mode != EncoderMode::kPrecomputed) {
    const std::size_t in = input_dim();
    const std::size_t h = config_.hidden;
    for (auto [dir, name] : {std::pair{&forward_, "fwd"}, std::pair{&backward_, "bwd"}}) {
      const std::string base = prefix + ".lstm." + name;
      dir->w_ih = &params.add(base + ".w_ih", {in, 4 * h});
      dir->w_hh = &params.add(base + ".w_hh", {h, 4 * h});
      dir->bias = &params.add(base + ".bias", {4 * h});
    }
  }
}

std::size_t Encoder::input_dim() const {
  return config_.mode == EncoderMode::kTrainableLstm ? config_.word_dim
                                                     : config_.precomputed_dim;
}

std::size_t Encoder::output_dim() const {
  return config_.mode == EncoderMode::kPrecomputed ? config_.precomputed_dim
                                                   : 2 * config_.hidden;
}

void Encoder::init(Random& rng, const EmbeddingTable* pretrained) {
  if (embedding_ != nullptr) {
    const std::size_t d = config_.word_dim;
    if (pretrained != nullptr && pretrained->dim != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "word vectors have width " + std::to_string(pretrained->dim) +
                      ", encoder expects " + std::to_string(d));
    }
    for (std::size_t r = 0; r < vocab_.size(); ++r) {
      double* dst = embedding_->value.data() + r * d;
      const int id = static_cast<int>(r);
      if (id == Vocabulary::kPad) {
        std::fill(dst, dst + d, 0.0);
      } else if (pretrained != nullptr && pretrained->vocab.contains(vocab_.word(id))) {
        const auto src = pretrained->row(pretrained->vocab.lookup(vocab_.word(id)));
        std::copy(src.begin(), src.end(), dst);
      } else {
        for (std::size_t c = 0; c < d; ++c) dst[c] = rng.uniform(-0.1, 0.1);
      }
    }
  }
  if (forward_.w_ih != nullptr) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(config_.hidden));
    for (const Direction* dir : {&forward_, &backward_}) {
      for (ad::Parameter* p : {dir->w_ih, dir->w_hh, dir->bias}) {
        for (double& v : p->value) v = rng.uniform(-bound, bound);
      }
    }
  }
}

EncoderInput Encoder::prepare(const std::string& doc_id, int sent_index,
                              const Sentence& tokens,
                              const PrecomputedEmbeddings* precomputed,
                              std::size_t padded_length) const {
  EncoderInput input;
  input.length = tokens.size();
  input.padded_length = std::max(padded_length, tokens.size());
  if (config_.mode == EncoderMode::kTrainableLstm) {
    for (const auto& tok : tokens) input.token_ids.push_back(vocab_.lookup(tok.text));
  } else {
    if (precomputed == nullptr) {
      throw Error(ErrorCode::kMissingEmbeddingEntry, "no precomputed vectors loaded");
    }
    if (precomputed->dim() != config_.precomputed_dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "vectors have width " + std::to_string(precomputed->dim()) +
                      ", encoder expects " + std::to_string(config_.precomputed_dim));
    }
    input.vectors = &precomputed->get(doc_id, sent_index, tokens.size());
  }
  return input;
}

ad::Tensor Encoder::run_direction(ad::Tape& tape, const ad::Tensor& inputs,
                                  const Direction& dir, bool reverse) const {
  const std::size_t n = inputs.shape()[0];
  const std::size_t h = config_.hidden;
  // Gate layout along the 4h axis: input, forget, cell, output.
  const ad::Tensor projected = ad::add(ad::matmul(inputs, tape.param(*dir.w_ih)),
                                       tape.param(*dir.bias));
  const ad::Tensor w_hh = tape.param(*dir.w_hh);
  ad::Tensor hidden = tape.zeros({1, h});
  ad::Tensor cell = tape.zeros({1, h});
  std::vector<ad::Tensor> outputs(n);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    const ad::Tensor gates = ad::add(ad::slice(projected, 0, t, t + 1), ad::matmul(hidden, w_hh));
    const ad::Tensor in_gate = ad::sigmoid(ad::slice(gates, 1, 0, h));
    const ad::Tensor forget_gate = ad::sigmoid(ad::slice(gates, 1, h, 2 * h));
    const ad::Tensor candidate = ad::tanh(ad::slice(gates, 1, 2 * h, 3 * h));
    const ad::Tensor out_gate = ad::sigmoid(ad::slice(gates, 1, 3 * h, 4 * h));
    cell = ad::add(ad::mul(forget_gate, cell), ad::mul(in_gate, candidate));
    hidden = ad::mul(out_gate, ad::tanh(cell));
    outputs[t] = hidden;
  }
  return ad::concat(outputs, 0);
}

ad::Tensor Encoder::encode(ad::Tape& tape, const EncoderInput& input,
                           const EncodeOptions& options) const {
  const std::size_t n = input.length;
  const std::size_t padded = std::max(input.padded_length, n);
  if (n == 0) return tape.zeros({padded, output_dim()});
  ad::Tensor inputs;
  if (config_.mode == EncoderMode::kTrainableLstm) {
    if (input.token_ids.size() != n) {
      throw Error(ErrorCode::kLengthMismatch, "token ids do not match sentence length");
    }
    inputs = ad::gather_rows(tape, *embedding_, input.token_ids, embedding_->trainable);
  } else {
    if (input.vectors == nullptr || input.vectors->rows != n) {
      throw Error(ErrorCode::kTokenCountMismatch, "precomputed vectors do not match sentence");
    }
    if (input.vectors->cols != input_dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "precomputed vector width mismatch");
    }
    inputs = tape.constant({n, input.vectors->cols}, input.vectors->data);
  }
  ad::Tensor out = inputs;
  if (config_.mode != EncoderMode::kPrecomputed) {
    out = ad::concat({run_direction(tape, inputs, forward_, false),
                      run_direction(tape, inputs, backward_, true)},
                     1);
  }
  out = ad::dropout(out, config_.dropout, options.train, options.seed, options.step);
  if (padded > n) out = ad::concat({out, tape.zeros({padded - n, output_dim()})}, 0);
  return out;
}

void Encoder::mask_gradients() const {
  if (embedding_ == nullptr) return;
  const std::size_t d = config_.word_dim;
  std::fill_n(embedding_->grad.begin() + static_cast<std::ptrdiff_t>(Vocabulary::kPad * d), d, 0.0);
}

}  // namespace jmie
