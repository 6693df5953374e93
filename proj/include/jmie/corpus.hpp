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

#ifndef JMIE_CORPUS_HPP_
#define JMIE_CORPUS_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jmie/labels.hpp"

namespace jmie {

struct Token {
  std::string text;
  int sent_index = 0;
  int tok_index = 0;
};

// Contiguous concept mention; end_tok is inclusive and is the head token.
struct ConceptSpan {
  int sent_index = 0;
  int start_tok = 0;
  int end_tok = 0;
  ConceptType ctype = ConceptType::kProblem;

  int head() const { return end_tok; }
  int length() const { return end_tok - start_tok + 1; }
  bool same_extent(const ConceptSpan& o) const {
    return sent_index == o.sent_index && start_tok == o.start_tok &&
           end_tok == o.end_tok;
  }
  auto operator<=>(const ConceptSpan&) const = default;
};

struct AssertionLabel {
  ConceptSpan span;
  Assertion label = Assertion::kPresent;
  auto operator<=>(const AssertionLabel&) const = default;
};

struct RelationTriple {
  ConceptSpan subject;
  Relation label = Relation::kTrAP;
  ConceptSpan object;
  auto operator<=>(const RelationTriple&) const = default;
};

using Sentence = std::vector<Token>;
using TagSequence = std::vector<Tag>;

struct AnnotatedDocument {
  std::string doc_id;
  std::vector<Sentence> sentences;
  std::vector<ConceptSpan> concepts;
  std::vector<AssertionLabel> assertions;
  std::vector<RelationTriple> relations;
  // Relations whose concepts sit in different sentences; dropped at parse.
  std::size_t dropped_cross_sentence = 0;

  std::size_t sentence_length(int s) const {
    return sentences.at(static_cast<std::size_t>(s)).size();
  }
};

using Corpus = std::vector<AnnotatedDocument>;

// Per-sentence view of a document's annotations, used by the models.
struct SentenceAnnotations {
  std::vector<ConceptSpan> concepts;
  std::vector<AssertionLabel> assertions;
  std::vector<RelationTriple> relations;
};

std::vector<SentenceAnnotations> group_by_sentence(const AnnotatedDocument& doc);

// Splits one line of text into tokens on runs of whitespace.
std::vector<std::string> tokenize(std::string_view line);

// Parses an i2b2-style report: a line-per-sentence text plus concept,
// assertion and relation annotation files. Throws jmie::Error.
AnnotatedDocument parse_document(std::string doc_id, std::string_view text,
                                 std::string_view con, std::string_view ast,
                                 std::string_view rel);

// Deterministic annotation file contents, sorted by line then offset.
std::string serialize_text(const AnnotatedDocument& doc);
std::string serialize_concepts(const AnnotatedDocument& doc);
std::string serialize_assertions(const AnnotatedDocument& doc);
std::string serialize_relations(const AnnotatedDocument& doc);

// Verifies gold-data invariants: spans in range and non-overlapping, every
// problem has exactly one assertion, assertions only on problems, relation
// categories consistent. Throws on violation.
void check_gold_invariants(const AnnotatedDocument& doc);

// Corpus directories follow the i2b2 layout: txt/<id>.txt, concept/<id>.con,
// ast/<id>.ast, rel/<id>.rel. Missing annotation files count as empty.
// Subdirectories holding such a layout (e.g. beth/, partners/) are merged.
Corpus load_corpus(const std::filesystem::path& dir, int jobs = 1);
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
void write_document(const AnnotatedDocument& doc,
                    const std::filesystem::path& dir);

TagSequence spans_to_bio(std::size_t sentence_len,
                         const std::vector<ConceptSpan>& spans);
// Total inverse of spans_to_bio; an I-t that does not continue a t-span
// starts a new span.
std::vector<ConceptSpan> bio_to_spans(const TagSequence& tags,
                                      int sent_index = 0);

struct TrainDevSplit {
  Corpus train;
  Corpus dev;
};
// Document-level split with |dev| = round(fraction * N); deterministic in seed.
TrainDevSplit split_train_dev(const Corpus& corpus, double fraction,
                              std::uint64_t seed);

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t concepts = 0;
  std::size_t assertions = 0;
  std::size_t relations = 0;
};
CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace jmie

#endif  // JMIE_CORPUS_HPP_
