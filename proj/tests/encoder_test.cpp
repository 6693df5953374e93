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

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "jmie/encoder.hpp"
#include "jmie/error.hpp"
#include "jmie/ops.hpp"
#include "test_util.hpp"

namespace jmie {
namespace {

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

Sentence make_sentence(const std::vector<std::string>& words) {
  Sentence s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    s.push_back(Token{words[i], 0, static_cast<int>(i)});
  }
  return s;
}

TEST(Vocabulary, ReservedRowsAndLowercasing) {
  Vocabulary v;
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.add("Aspirin"), 2);
  EXPECT_EQ(v.add("ASPIRIN"), 2);
  EXPECT_EQ(v.lookup("aspirin"), 2);
  EXPECT_EQ(v.lookup("tylenol"), Vocabulary::kUnk);
  const Vocabulary back = Vocabulary::parse(v.serialize());
  EXPECT_EQ(back.size(), 3u);
  EXPECT_EQ(back.lookup("Aspirin"), 2);
}

TEST(WordVectors, UnknownRowIsMeanAndPadIsZero) {
  const EmbeddingTable t = parse_word_vectors("fever 1 2\nrash 3 -4\n\n");
  ASSERT_EQ(t.dim, 2u);
  EXPECT_EQ(t.vocab.size(), 4u);
  EXPECT_EQ(t.row(Vocabulary::kPad)[0], 0.0);
  EXPECT_EQ(t.row(Vocabulary::kUnk)[0], 2.0);
  EXPECT_EQ(t.row(Vocabulary::kUnk)[1], -1.0);
  EXPECT_EQ(t.row(t.vocab.lookup("RASH"))[1], -4.0);
}

TEST(WordVectors, Errors) {
  EXPECT_EQ(error_of([] { parse_word_vectors("a 1 2\nb 3\n"); }), ErrorCode::kRaggedLine);
  EXPECT_EQ(error_of([] { parse_word_vectors("a\n"); }), ErrorCode::kRaggedLine);
  EXPECT_EQ(error_of([] { parse_word_vectors("\n\n"); }), ErrorCode::kEmptyFile);
  EXPECT_EQ(error_of([] { parse_word_vectors(""); }), ErrorCode::kEmptyFile);
}

TEST(Precomputed, HandWrittenBytesDecode) {
  std::string bytes = "JEMB1";
  bytes += std::string("\x01\x00\x00\x00", 4);  // version
  bytes += std::string("\x02\x00\x00\x00", 4);  // dim
  bytes += std::string("\x01\x00\x00\x00", 4);  // docs
  bytes += std::string("\x03\x00", 2) + "r01";
  bytes += std::string("\x01\x00\x00\x00", 4);  // sentences
  bytes += std::string("\x01\x00\x00\x00", 4);  // tokens
  bytes += std::string("\x00\x00\x80\x3f", 4);  // 1.0f
  bytes += std::string("\x00\x00\x00\xc0", 4);  // -2.0f
  const PrecomputedEmbeddings e = PrecomputedEmbeddings::decode(bytes);
  EXPECT_EQ(e.dim(), 2u);
  const EmbeddingMatrix& m = e.get("r01", 0, 1);
  EXPECT_EQ(m.data, (std::vector<double>{1.0, -2.0}));
  EXPECT_EQ(e.encode(), bytes);
}

TEST(Precomputed, RoundTripAndErrors) {
  PrecomputedEmbeddings e(3);
  EmbeddingMatrix a{2, 3, {0.5, 1, 2, 3, 4, -0.25}};
  EmbeddingMatrix b{1, 3, {7, 8, 9}};
  e.add_document("doc", {a, b});
  const PrecomputedEmbeddings back = PrecomputedEmbeddings::decode(e.encode());
  EXPECT_EQ(back.get("doc", 1, 1).data, b.data);
  EXPECT_EQ(back.encode(), e.encode());

  EXPECT_EQ(error_of([&] { back.get("other", 0, 2); }), ErrorCode::kMissingEmbeddingEntry);
  EXPECT_EQ(error_of([&] { back.get("doc", 2, 1); }), ErrorCode::kMissingEmbeddingEntry);
  EXPECT_EQ(error_of([&] { back.get("doc", 0, 3); }), ErrorCode::kTokenCountMismatch);
  std::string bad = e.encode();
  bad[4] = '2';
  EXPECT_EQ(error_of([&] { PrecomputedEmbeddings::decode(bad); }), ErrorCode::kBadMagic);
  EXPECT_EQ(error_of([&] { PrecomputedEmbeddings::decode(e.encode() + "z"); }), ErrorCode::kIo);
}

// Plain-loop LSTM with gates ordered input, forget, cell, output.
std::vector<std::vector<double>> reference_lstm(const std::vector<std::vector<double>>& x,
                                                const ad::Parameter& w_ih,
                                                const ad::Parameter& w_hh,
                                                const ad::Parameter& bias, bool reverse) {
  const std::size_t n = x.size();
  const std::size_t in = w_ih.shape[0];
  const std::size_t h = w_hh.shape[0];
  std::vector<double> hid(h, 0.0);
  std::vector<double> cell(h, 0.0);
  std::vector<std::vector<double>> out(n);
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    std::vector<double> g(4 * h);
    for (std::size_t k = 0; k < 4 * h; ++k) {
      double z = bias.value[k];
      for (std::size_t i = 0; i < in; ++i) z += x[t][i] * w_ih.value[i * 4 * h + k];
      for (std::size_t i = 0; i < h; ++i) z += hid[i] * w_hh.value[i * 4 * h + k];
      g[k] = z;
    }
    for (std::size_t k = 0; k < h; ++k) {
      cell[k] = sig(g[h + k]) * cell[k] + sig(g[k]) * std::tanh(g[2 * h + k]);
      hid[k] = sig(g[3 * h + k]) * std::tanh(cell[k]);
    }
    out[t] = hid;
  }
  return out;
}

struct Fixture {
  ad::ParameterSet params;
  Encoder encoder;
  explicit Fixture(EncoderConfig config)
      : encoder(config, vocab(), params, "enc") {
    Random rng(11);
    encoder.init(rng);
  }
  static Vocabulary vocab() {
    Vocabulary v;
    for (const char* w : {"pain", "in", "chest", "denies", "fever"}) v.add(w);
    return v;
  }
};

EncoderConfig small_config() {
  EncoderConfig c;
  c.word_dim = 4;
  c.hidden = 3;
  c.dropout = 0.0;
  return c;
}

TEST(Encoder, MatchesScalarLstmReference) {
  Fixture f(small_config());
  const Sentence s = make_sentence({"Pain", "in", "chest", "unseen"});
  const EncoderInput input = f.encoder.prepare("d", 0, s, nullptr);
  ad::Tape tape;
  const ad::Tensor out = f.encoder.encode(tape, input);
  ASSERT_EQ(out.shape(), (ad::Shape{4, 6}));

  const ad::Parameter& embed = f.params.get("enc.embed");
  std::vector<std::vector<double>> x;
  for (int id : input.token_ids) {
    x.emplace_back(embed.value.begin() + id * 4, embed.value.begin() + id * 4 + 4);
  }
  EXPECT_EQ(input.token_ids[3], Vocabulary::kUnk);
  const auto fwd = reference_lstm(x, f.params.get("enc.lstm.fwd.w_ih"),
                                  f.params.get("enc.lstm.fwd.w_hh"),
                                  f.params.get("enc.lstm.fwd.bias"), false);
  const auto bwd = reference_lstm(x, f.params.get("enc.lstm.bwd.w_ih"),
                                  f.params.get("enc.lstm.bwd.w_hh"),
                                  f.params.get("enc.lstm.bwd.bias"), true);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(out.at(t, k), fwd[t][k], 1e-10);
      EXPECT_NEAR(out.at(t, 3 + k), bwd[t][k], 1e-10);
    }
  }
}

// With identical weights in both directions, reversing the sentence swaps
// the forward and backward halves.
TEST(Encoder, DirectionalSymmetry) {
  Fixture f(small_config());
  for (const char* part : {".w_ih", ".w_hh", ".bias"}) {
    f.params.get(std::string("enc.lstm.bwd") + part).value =
        f.params.get(std::string("enc.lstm.fwd") + part).value;
  }
  const Sentence s = make_sentence({"denies", "chest", "pain"});
  const Sentence r = make_sentence({"pain", "chest", "denies"});
  ad::Tape tape;
  const ad::Tensor a = f.encoder.encode(tape, f.encoder.prepare("d", 0, s, nullptr));
  const ad::Tensor b = f.encoder.encode(tape, f.encoder.prepare("d", 0, r, nullptr));
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(a.at(t, k), b.at(2 - t, 3 + k), 1e-12);
      EXPECT_NEAR(a.at(t, 3 + k), b.at(2 - t, k), 1e-12);
    }
  }
}

TEST(Encoder, PaddingRowsAreZeroAndInert) {
  Fixture f(small_config());
  const Sentence s = make_sentence({"chest", "pain"});
  ad::Tape tape;
  const ad::Tensor plain = f.encoder.encode(tape, f.encoder.prepare("d", 0, s, nullptr));
  const ad::Tensor padded = f.encoder.encode(tape, f.encoder.prepare("d", 0, s, nullptr, 5));
  ASSERT_EQ(padded.shape(), (ad::Shape{5, 6}));
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t k = 0; k < 6; ++k) {
      if (t < 2) {
        EXPECT_EQ(padded.at(t, k), plain.at(t, k));
      } else {
        EXPECT_EQ(padded.at(t, k), 0.0);
      }
    }
  }
}

TEST(Encoder, PretrainedRowsAreCopied) {
  ad::ParameterSet params;
  EncoderConfig c = small_config();
  c.word_dim = 2;
  Encoder enc(c, Fixture::vocab(), params, "enc");
  const EmbeddingTable table = parse_word_vectors("chest 0.5 -0.5\nfever 2 3\n");
  Random rng(3);
  enc.init(rng, &table);
  const ad::Parameter& e = params.get("enc.embed");
  const int chest = enc.vocab().lookup("chest");
  EXPECT_EQ(e.value[static_cast<std::size_t>(chest) * 2], 0.5);
  EXPECT_EQ(e.value[0], 0.0);
  EXPECT_EQ(e.value[1], 0.0);

  ad::ParameterSet other;
  c.word_dim = 3;
  Encoder wrong(c, Fixture::vocab(), other, "enc");
  EXPECT_EQ(error_of([&] { wrong.init(rng, &table); }), ErrorCode::kDimensionMismatch);
}

TEST(Encoder, PrecomputedModePassesVectorsThrough) {
  EncoderConfig c;
  c.mode = EncoderMode::kPrecomputed;
  c.precomputed_dim = 2;
  c.dropout = 0.0;
  ad::ParameterSet params;
  Encoder enc(c, Vocabulary(), params, "enc");
  EXPECT_EQ(params.size(), 0u);
  PrecomputedEmbeddings pre(2);
  pre.add_document("d", {EmbeddingMatrix{2, 2, {1, 2, 3, 4}}});
  ad::Tape tape;
  const ad::Tensor out = enc.encode(tape, enc.prepare("d", 0, make_sentence({"a", "b"}), &pre));
  EXPECT_EQ(out.at(1, 0), 3.0);
  EXPECT_EQ(error_of([&] { enc.prepare("d", 0, make_sentence({"a"}), &pre); }),
            ErrorCode::kTokenCountMismatch);
  EXPECT_EQ(error_of([&] { enc.prepare("x", 0, make_sentence({"a"}), &pre); }),
            ErrorCode::kMissingEmbeddingEntry);
}

TEST(Encoder, GradientsMatchFiniteDifferences) {
  Fixture f(small_config());
  const Sentence s = make_sentence({"denies", "fever", "pain"});
  const EncoderInput input = f.encoder.prepare("d", 0, s, nullptr);
  std::vector<ad::Parameter*> ps;
  for (auto& p : f.params) ps.push_back(&p);
  const auto check = testing::check_gradients(ps, [&](ad::Tape& tape) {
    const ad::Tensor out = f.encoder.encode(tape, input);
    return ad::sum(ad::mul(out, out));
  });
  EXPECT_LT(check.rel_error, 1e-6);
}

}  // namespace
}  // namespace jmie
