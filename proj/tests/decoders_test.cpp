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
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "jmie/decoders.hpp"
#include "jmie/error.hpp"
#include "jmie/ops.hpp"
#include "test_util.hpp"

namespace jmie {
namespace {

constexpr int K = kNumRelationClasses;

constexpr const char* kText =
    "He was given aspirin for chest pain .\n"
    "CBC showed anemia and heparin caused anemia\n";
constexpr const char* kCon =
    "c=\"aspirin\" 1:3 1:3||t=\"treatment\"\n"
    "c=\"chest pain\" 1:5 1:6||t=\"problem\"\n"
    "c=\"cbc\" 2:0 2:0||t=\"test\"\n"
    "c=\"anemia\" 2:2 2:2||t=\"problem\"\n"
    "c=\"heparin\" 2:4 2:4||t=\"treatment\"\n"
    "c=\"anemia\" 2:6 2:6||t=\"problem\"\n";
constexpr const char* kAst =
    "c=\"chest pain\" 1:5 1:6||t=\"problem\"||a=\"present\"\n"
    "c=\"anemia\" 2:2 2:2||t=\"problem\"||a=\"possible\"\n"
    "c=\"anemia\" 2:6 2:6||t=\"problem\"||a=\"present\"\n";
constexpr const char* kRel =
    "c=\"aspirin\" 1:3 1:3||r=\"TrAP\"||c=\"chest pain\" 1:5 1:6\n"
    "c=\"cbc\" 2:0 2:0||r=\"TeRP\"||c=\"anemia\" 2:2 2:2\n"
    "c=\"heparin\" 2:4 2:4||r=\"TrCP\"||c=\"anemia\" 2:6 2:6\n"
    "c=\"cbc\" 2:0 2:0||r=\"TeCP\"||c=\"anemia\" 2:6 2:6\n";

Corpus fixture_corpus() {
  return {parse_document("d1", kText, kCon, kAst, kRel)};
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.encoder.word_dim = 3;
  c.encoder.hidden = 2;
  c.encoder.dropout = 0.0;
  c.concept_dim = 2;
  c.assertion_dim = 2;
  c.scorer_dim = 3;
  return c;
}

Vocabulary fixture_vocab(const Corpus& corpus) {
  Vocabulary v;
  for (const auto& d : corpus) {
    for (const auto& s : d.sentences) {
      for (const auto& t : s) v.add(t.text);
    }
  }
  return v;
}

std::vector<ad::Parameter*> all_params(ad::ParameterSet& set) {
  std::vector<ad::Parameter*> out;
  for (auto& p : set) out.push_back(&p);
  return out;
}

TEST(RelationSupport, SizeAndLayout) {
  for (std::size_t length = 1; length <= 6; ++length) {
    const std::size_t padded = length + 2;
    const auto support = RelationHead::softmax_support(padded, length);
    for (std::size_t i = 0; i < padded; ++i) {
      double count = 0.0;
      for (std::size_t c = 0; c < padded * K; ++c) count += support[i * padded * K + c];
      if (i < length) {
        // n*K' - (K' - 1) with K' = 8 real labels.
        EXPECT_EQ(count, 8.0 * static_cast<double>(length) - 7.0);
      } else {
        EXPECT_EQ(count, 1.0);
      }
      EXPECT_EQ(support[i * padded * K + i * K + kNoLink], 1.0);
      for (int k = 0; k < kNoLink; ++k) EXPECT_EQ(support[i * padded * K + i * K + k], 0.0);
    }
  }
}

struct RelationFixture {
  ad::ParameterSet params;
  RelationHead head{4, 3, params, "relation"};
  ad::Parameter features{"features", {5, 4}};
  explicit RelationFixture(std::uint64_t seed) {
    Random rng(seed);
    head.init(rng);
    for (double& v : features.value) v = rng.uniform(-1.0, 1.0);
  }
};

TEST(RelationHead, ScoresMatchDirectFormula) {
  RelationFixture f(3);
  ad::Tape tape;
  const auto out = f.head.forward(tape, tape.param(f.features), 5, RelationMode::kSoftmax,
                                  nullptr, nullptr);
  ASSERT_EQ(out.scores.shape(), (ad::Shape{5, 5 * K}));
  const auto& u = f.params.get("relation.u").value;
  const auto& v = f.params.get("relation.v").value;
  const auto& l = f.params.get("relation.labels").value;
  const auto& x = f.features.value;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < 3; ++m) {
          double z = 0.0;
          for (std::size_t d = 0; d < 4; ++d) z += x[j * 4 + d] * u[d * 3 + m] + x[i * 4 + d] * v[d * 3 + m];
          s += l[m * K + k] * std::tanh(z);
        }
        ASSERT_NEAR(out.scores.at(i, j * K + k), s, 1e-10);
      }
    }
  }
}

TEST(RelationHead, ZeroScoresGiveUniformSoftmax) {
  RelationFixture f(4);
  auto& labels = f.params.get("relation.labels");
  std::fill(labels.value.begin(), labels.value.end(), 0.0);
  const std::vector<TokenRelation> gold = {{2, 0, 3}};
  ad::Tape tape;
  const auto out = f.head.forward(tape, tape.param(f.features), 4, RelationMode::kSoftmax,
                                  &gold, nullptr);
  EXPECT_EQ(out.loss_count, 4u);
  EXPECT_NEAR(out.loss_sum.item(), 4.0 * std::log(8.0 * 4 - 7), 1e-12);
}

TEST(RelationHead, SoftmaxRowsSumToOne) {
  RelationFixture f(5);
  ad::Tape tape;
  const std::size_t length = 4;
  const auto out = f.head.forward(tape, tape.param(f.features), length, RelationMode::kSoftmax,
                                  nullptr, nullptr);
  const auto support = RelationHead::softmax_support(5, length);
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<double> row_mask(5, 0.0);
    row_mask[i] = 1.0;
    double total = 0.0;
    for (std::size_t c = 0; c < 5 * K; ++c) {
      if (support[i * 5 * K + c] == 0.0) continue;
      std::vector<int> targets(5);
      for (std::size_t r = 0; r < 5; ++r) targets[r] = static_cast<int>(r * K + kNoLink);
      targets[i] = static_cast<int>(c);
      total += std::exp(-ad::cross_entropy(out.scores, targets, row_mask, support,
                                           ad::Reduction::kSum).item());
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(RelationHead, SigmoidLossMatchesDirectSum) {
  RelationFixture f(6);
  const std::vector<TokenRelation> gold = {{1, 0, 2}, {1, 2, 5}};
  ad::Tape tape;
  const std::size_t length = 3;
  const auto out = f.head.forward(tape, tape.param(f.features), length, RelationMode::kSigmoid,
                                  &gold, nullptr);
  EXPECT_EQ(out.loss_count, length * length * 8);
  double expected = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t j = 0; j < length; ++j) {
      for (int k = 0; k < kNoLink; ++k) {
        const double z = out.scores.at(i, j * K + static_cast<std::size_t>(k));
        double y = 0.0;
        for (const auto& g : gold) {
          if (g.object_head == static_cast<int>(i) && g.subject_head == static_cast<int>(j) &&
              g.label == k) {
            y = 1.0;
          }
        }
        expected += -y * std::log(1.0 / (1.0 + std::exp(-z))) -
                    (1.0 - y) * std::log(1.0 - 1.0 / (1.0 + std::exp(-z)));
      }
    }
  }
  EXPECT_NEAR(out.loss_sum.item(), expected, 1e-10);
}

TEST(RelationHead, LossGradientsMatchFiniteDifferences) {
  for (RelationMode mode : {RelationMode::kSoftmax, RelationMode::kSigmoid}) {
    RelationFixture f(7);
    f.features.shape = {3, 4};
    f.features.value.resize(12);
    f.features.grad.resize(12);
    const std::vector<TokenRelation> gold = {{2, 0, 1}};
    std::vector<ad::Parameter*> ps = all_params(f.params);
    ps.push_back(&f.features);
    const auto check = testing::check_gradients(ps, [&](ad::Tape& tape) {
      return f.head.forward(tape, tape.param(f.features), 3, mode, &gold, nullptr).loss_sum;
    });
    EXPECT_LT(check.rel_error, 1e-6) << to_string(mode);
  }
}

TEST(RelationTargets, FirstCellPerObjectWins) {
  const std::vector<TokenRelation> gold = {{3, 2, 5}, {3, 0, 4}, {1, 0, 0}};
  const auto t = softmax_relation_targets(gold, 4, 6);
  EXPECT_EQ(t[0], 0 * K + kNoLink);
  EXPECT_EQ(t[1], 0 * K + 0);
  EXPECT_EQ(t[3], 0 * K + 4);
  EXPECT_EQ(t[5], 5 * K + kNoLink);
  EXPECT_THROW(softmax_relation_targets({{4, 0, 1}}, 4, 6), Error);
}

// Decode is argmax over each object head's support, kept when the winner is
// a real label at another span head and the types fit.
TEST(RelationHead, DecodeMatchesArgmaxOracle) {
  const std::vector<ConceptSpan> spans = {
      {0, 0, 0, ConceptType::kTreatment}, {0, 1, 2, ConceptType::kProblem},
      {0, 3, 3, ConceptType::kTest}, {0, 4, 4, ConceptType::kProblem}};
  std::size_t emitted = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RelationFixture f(seed);
    ad::Tape tape;
    const auto out = f.head.forward(tape, tape.param(f.features), 5, RelationMode::kSoftmax,
                                    nullptr, &spans);
    std::map<int, ConceptSpan> by_head;
    for (const auto& s : spans) by_head[s.head()] = s;
    std::vector<RelationTriple> expected;
    for (const auto& [i, object] : by_head) {
      double best = out.scores.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i) * K + kNoLink);
      int best_j = i;
      int best_k = kNoLink;
      for (int j = 0; j < 5; ++j) {
        if (j == i) continue;
        for (int k = 0; k < kNoLink; ++k) {
          const double s = out.scores.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j * K + k));
          if (s > best) {
            best = s;
            best_j = j;
            best_k = k;
          }
        }
      }
      if (best_k == kNoLink || !by_head.count(best_j)) continue;
      const auto label = static_cast<Relation>(best_k);
      if (by_head[best_j].ctype != relation_subject_type(label) ||
          object.ctype != ConceptType::kProblem) {
        continue;
      }
      expected.push_back(RelationTriple{by_head[best_j], label, object});
    }
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(out.triples, expected) << "seed " << seed;
    emitted += expected.size();
  }
  EXPECT_GT(emitted, 0u);
}

TEST(RepresentableTriples, FiltersAndDeduplicates) {
  const ConceptSpan tr{0, 0, 0, ConceptType::kTreatment};
  const ConceptSpan pr{0, 2, 3, ConceptType::kProblem};
  const ConceptSpan te{0, 5, 5, ConceptType::kTest};
  const auto kept = representable_triples({{tr, Relation::kTrAP, pr},
                                           {tr, Relation::kTrAP, pr},
                                           {te, Relation::kTrAP, pr},
                                           {pr, Relation::kPIP, pr},
                                           {te, Relation::kTeRP, tr},
                                           {te, Relation::kTeRP, pr}});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].label, Relation::kTrAP);
  EXPECT_EQ(kept[1].label, Relation::kTeRP);
}

TEST(AssertionHead, ZeroWeightsGiveUniformDistribution) {
  ad::ParameterSet params;
  AssertionHead head(3, 2, params, "assertion");
  ad::Tape tape;
  const ad::Tensor x = tape.constant({4, 3}, std::vector<double>(12, 0.7));
  const ad::Tensor ce = tape.constant({4, 2}, std::vector<double>(8, -0.2));
  const auto out = head.forward(tape, x, ce, {1, 3}, {-1, 2, -1, -1});
  ASSERT_EQ(out.probabilities.size(), 2u);
  for (const auto& p : out.probabilities) {
    for (double v : p) EXPECT_NEAR(v, 1.0 / 6.0, 1e-15);
  }
  EXPECT_EQ(out.loss_count, 1u);
  EXPECT_NEAR(out.loss_sum.item(), std::log(6.0), 1e-12);
}

TEST(AssertionHead, LogitsMatchDirectProduct) {
  ad::ParameterSet params;
  AssertionHead head(3, 2, params, "assertion");
  Random rng(9);
  head.init(rng);
  for (double& b : params.get("assertion.b").value) b = rng.uniform(-1, 1);
  std::vector<double> xv(12);
  std::vector<double> cv(8);
  for (double& v : xv) v = rng.uniform(-1, 1);
  for (double& v : cv) v = rng.uniform(-1, 1);
  ad::Tape tape;
  const auto out = head.forward(tape, tape.constant({4, 3}, xv), tape.constant({4, 2}, cv),
                                {0, 2}, {});
  const auto& w = params.get("assertion.w").value;
  const auto& b = params.get("assertion.b").value;
  for (std::size_t r = 0; r < 2; ++r) {
    const std::size_t h = r == 0 ? 0 : 2;
    for (std::size_t c = 0; c < 6; ++c) {
      double z = b[c];
      for (std::size_t d = 0; d < 3; ++d) z += xv[h * 3 + d] * w[d * 6 + c];
      for (std::size_t d = 0; d < 2; ++d) z += cv[h * 2 + d] * w[(3 + d) * 6 + c];
      EXPECT_NEAR(out.logits.at(r, c), z, 1e-10);
    }
  }
  EXPECT_FALSE(out.loss_sum.valid());
  EXPECT_THROW(head.forward(tape, tape.constant({4, 3}, xv), tape.constant({4, 2}, cv), {4}, {}),
               Error);
}

TEST(MakeExamples, TokenLevelGold) {
  const Corpus corpus = fixture_corpus();
  ad::ParameterSet params;
  Encoder enc(tiny_config().encoder, fixture_vocab(corpus), params, "enc");
  const auto ex = make_examples(corpus, enc, nullptr);
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].gold_tags, (TagSequence{0, 0, 0, 3, 0, 1, 2, 0}));
  EXPECT_EQ(ex[0].gold_assertions[6], static_cast<int>(Assertion::kPresent));
  EXPECT_EQ(ex[0].gold_assertions[5], -1);
  ASSERT_EQ(ex[0].gold_relations.size(), 1u);
  EXPECT_EQ(ex[0].gold_relations[0].object_head, 6);
  EXPECT_EQ(ex[0].gold_relations[0].subject_head, 3);
  EXPECT_EQ(ex[1].extra_relations, 1u);
  EXPECT_EQ(ex[1].sent_index, 1);
}

struct JointFixture {
  Corpus corpus = fixture_corpus();
  JointModel model;
  std::vector<SentenceExample> examples;
  explicit JointFixture(ModelConfig config = tiny_config())
      : model(config, fixture_vocab(corpus)) {
    model.init(5);
    examples = make_examples(corpus, model.encoder(), nullptr);
  }
  std::vector<const SentenceExample*> batch() const {
    std::vector<const SentenceExample*> b;
    for (const auto& e : examples) b.push_back(&e);
    return b;
  }
};

TEST(JointModel, LossIsExactSumOfStages) {
  for (RelationMode mode : {RelationMode::kSoftmax, RelationMode::kSigmoid}) {
    for (bool tf : {true, false}) {
      ModelConfig c = tiny_config();
      c.relation_mode = mode;
      JointFixture f(c);
      ad::Tape tape;
      const auto l = f.model.forward(tape, f.batch(), tf, {});
      const double sum = (l.concept_loss.item() + l.assertion_loss.item()) + l.relation_loss.item();
      EXPECT_EQ(l.total.item(), sum);
      EXPECT_GT(l.concept_loss.item(), 0.0);
      EXPECT_GT(l.relation_loss.item(), 0.0);
    }
  }
}

// Each stage loss recomputed on its own tape matches the joint tape.
TEST(JointModel, StageLossesMatchSeparateTapes) {
  JointFixture f;
  ad::Tape joint;
  const auto all = f.model.forward(joint, f.batch(), true, {});
  const std::pair<Stage, double> stages[] = {{Stage::kConcept, all.concept_loss.item()},
                                             {Stage::kAssertion, all.assertion_loss.item()},
                                             {Stage::kRelation, all.relation_loss.item()}};
  for (const auto& [stage, value] : stages) {
    ad::Tape tape;
    EXPECT_NEAR(f.model.forward(tape, f.batch(), true, {}, stage).total.item(), value, 1e-9);
  }
}

TEST(JointModel, PaddingDoesNotChangeLosses) {
  JointFixture f;
  ad::Tape a;
  const auto plain = f.model.forward(a, f.batch(), true, {});
  for (auto& e : f.examples) e.input.padded_length = e.input.length + 3;
  ad::Tape b;
  const auto padded = f.model.forward(b, f.batch(), true, {});
  EXPECT_NEAR(plain.concept_loss.item(), padded.concept_loss.item(), 1e-9);
  EXPECT_NEAR(plain.assertion_loss.item(), padded.assertion_loss.item(), 1e-9);
  EXPECT_NEAR(plain.relation_loss.item(), padded.relation_loss.item(), 1e-9);
}

TEST(JointModel, PerBatchMeans) {
  JointFixture f;
  ad::Tape tape;
  const auto both = f.model.forward(tape, f.batch(), true, {});
  ad::Tape t0;
  const auto first = f.model.forward(t0, {&f.examples[0]}, true, {});
  ad::Tape t1;
  const auto second = f.model.forward(t1, {&f.examples[1]}, true, {});
  EXPECT_NEAR(both.concept_loss.item(),
              (first.concept_loss.item() + second.concept_loss.item()) / 2.0, 1e-12);
  // Relation loss averages over tokens: 8 and 7.
  EXPECT_NEAR(both.relation_loss.item(),
              (8.0 * first.relation_loss.item() + 7.0 * second.relation_loss.item()) / 15.0,
              1e-12);
  // Assertion loss averages over gold-labelled heads: 1 and 2.
  EXPECT_NEAR(both.assertion_loss.item(),
              (first.assertion_loss.item() + 2.0 * second.assertion_loss.item()) / 3.0, 1e-12);
}

TEST(JointModel, FullLossGradientsMatchFiniteDifferences) {
  JointFixture f;
  const auto check = testing::check_gradients(all_params(f.model.params()), [&](ad::Tape& tape) {
    return f.model.forward(tape, f.batch(), true, {}).total;
  });
  EXPECT_LT(check.rel_error, 1e-4);
}

TEST(JointModel, PredictWithGoldInjection) {
  JointFixture f;
  const auto pred = f.model.predict(f.examples[1], GoldInjection{true, true});
  EXPECT_EQ(pred.concepts, f.examples[1].gold.concepts);
  ASSERT_EQ(pred.assertions.size(), 2u);
  EXPECT_EQ(pred.assertions[0].label, Assertion::kPossible);
  for (const auto& r : pred.relations) {
    EXPECT_EQ(r.subject.ctype, relation_subject_type(r.label));
  }
  const std::string dump = f.model.debug_scores(f.examples[0]);
  EXPECT_NE(dump.find("\"relation_scores\""), std::string::npos);
  EXPECT_EQ(dump.find('\n'), std::string::npos);
}

TEST(JointModel, InitIsDeterministic) {
  JointFixture a;
  JointFixture b;
  EXPECT_TRUE(a.model.params() == b.model.params());
  b.model.init(6);
  EXPECT_FALSE(a.model.params() == b.model.params());
}

}  // namespace
}  // namespace jmie
