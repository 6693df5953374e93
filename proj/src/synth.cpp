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

#include "jmie/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "jmie/error.hpp"
#include "jmie/random.hpp"

namespace jmie {
namespace {

using Rng = Random;

struct Piece {
  std::vector<std::string> tokens;
  // Concepts relative to the piece start.
  std::vector<ConceptSpan> concepts;
  std::vector<AssertionLabel> assertions;
  std::vector<RelationTriple> relations;
};

class SentenceBuilder {
 public:
  SentenceBuilder(const SynthSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

  // Appends a concept phrase of the given type, returning its span.
  ConceptSpan phrase(Piece& piece, ConceptType type) {
    const auto& [mods, heads] = vocab(type);
    const int start = static_cast<int>(piece.tokens.size());
    if (!mods.empty() && rng_.chance(spec_.modifier_rate)) {
      piece.tokens.push_back(rng_.pick(mods));
    }
    piece.tokens.push_back(rng_.pick(heads));
    ConceptSpan span{0, start, static_cast<int>(piece.tokens.size()) - 1, type};
    piece.concepts.push_back(span);
    return span;
  }

  ConceptSpan problem_phrase(Piece& piece) {
    Assertion label = Assertion::kPresent;
    if (!spec_.assertion_cues.empty() && rng_.chance(spec_.cue_rate)) {
      const auto& cue = rng_.pick(spec_.assertion_cues);
      piece.tokens.push_back(cue.word);
      label = cue.label;
    }
    const ConceptSpan span = phrase(piece, ConceptType::kProblem);
    piece.assertions.push_back(AssertionLabel{span, label});
    return span;
  }

  ConceptSpan any_phrase(Piece& piece, ConceptType type) {
    return type == ConceptType::kProblem ? problem_phrase(piece) : phrase(piece, type);
  }

  Piece mention() {
    Piece piece;
    any_phrase(piece, static_cast<ConceptType>(rng_.below(kNumConceptTypes)));
    return piece;
  }

  Piece relation_clause() {
    Piece piece;
    const auto& tmpl = rng_.pick(spec_.relation_templates);
    const ConceptSpan subj = any_phrase(piece, relation_subject_type(tmpl.label));
    piece.tokens.push_back(tmpl.connector);
    const ConceptSpan obj = problem_phrase(piece);
    piece.relations.push_back(RelationTriple{subj, tmpl.label, obj});
    return piece;
  }

  Piece filler(int count) {
    Piece piece;
    for (int i = 0; i < count; ++i) piece.tokens.push_back(rng_.pick(spec_.fillers));
    return piece;
  }

 private:
  std::pair<const std::vector<std::string>&, const std::vector<std::string>&> vocab(
      ConceptType type) const {
    switch (type) {
      case ConceptType::kProblem:
        return {spec_.problem_modifiers, spec_.problem_words};
      case ConceptType::kTreatment:
        return {spec_.treatment_modifiers, spec_.treatment_words};
      case ConceptType::kTest:
        break;
    }
    return {spec_.test_modifiers, spec_.test_words};
  }

  const SynthSpec& spec_;
  Rng& rng_;
};

void append(AnnotatedDocument& doc, int sent, const Piece& piece, int& offset) {
  auto shift = [&](ConceptSpan s) {
    s.sent_index = sent;
    s.start_tok += offset;
    s.end_tok += offset;
    return s;
  };
  auto& tokens = doc.sentences[static_cast<std::size_t>(sent)];
  for (const auto& word : piece.tokens) {
    tokens.push_back(Token{word, sent, static_cast<int>(tokens.size())});
  }
  for (const auto& c : piece.concepts) doc.concepts.push_back(shift(c));
  for (const auto& a : piece.assertions) {
    doc.assertions.push_back(AssertionLabel{shift(a.span), a.label});
  }
  for (const auto& r : piece.relations) {
    doc.relations.push_back(RelationTriple{shift(r.subject), r.label, shift(r.object)});
  }
  offset += static_cast<int>(piece.tokens.size());
}

void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidSpec, why); };
  if (spec.sentences < 1) fail("sentences must be positive");
  if (spec.sentences_per_doc < 1) fail("sentences_per_doc must be positive");
  if (spec.min_len < 1 || spec.max_len < spec.min_len) fail("bad sentence length range");
  for (double p : {spec.relation_clause_rate, spec.modifier_rate, spec.cue_rate}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("rates must lie in [0, 1]");
  }
  if (spec.fillers.empty() || spec.problem_words.empty() ||
      spec.treatment_words.empty() || spec.test_words.empty()) {
    fail("fillers and head-word lists must be non-empty");
  }
  std::set<std::string> seen;
  auto claim = [&](const std::string& w) {
    if (w.empty() || w.find_first_of(" \t\r\n") != std::string::npos) {
      fail("word '" + w + "' is empty or contains whitespace");
    }
    if (!seen.insert(w).second) fail("word '" + w + "' used in more than one role");
  };
  for (const auto* list : {&spec.fillers, &spec.problem_words, &spec.problem_modifiers,
                           &spec.treatment_words, &spec.treatment_modifiers,
                           &spec.test_words, &spec.test_modifiers}) {
    for (const auto& w : *list) claim(w);
  }
  for (const auto& cue : spec.assertion_cues) {
    if (cue.label == Assertion::kPresent) fail("present is the no-cue default");
    claim(cue.word);
  }
  for (const auto& t : spec.relation_templates) claim(t.connector);
}

}  // namespace

SynthSpec SynthSpec::defaults() {
  SynthSpec spec;
  spec.fillers = {"the", "patient", "was", "seen", "today", "and", "noted",
                  "on", "exam", "at", "home", "stable", "reports", "in",
                  "clinic", "follow", "up", "plan"};
  spec.problem_words = {"pain", "cough", "fever", "rash", "edema", "nausea",
                        "anemia", "sepsis"};
  spec.problem_modifiers = {"chest", "severe", "acute"};
  spec.treatment_words = {"aspirin", "heparin", "insulin", "lasix", "tylenol",
                          "morphine"};
  spec.treatment_modifiers = {"iv", "oral"};
  spec.test_words = {"cbc", "mri", "ekg", "xray", "culture"};
  spec.test_modifiers = {"repeat", "urgent"};
  spec.assertion_cues = {{"no", Assertion::kAbsent},
                         {"possible", Assertion::kPossible},
                         {"when", Assertion::kConditional},
                         {"risk", Assertion::kHypothetical},
                         {"family", Assertion::kAssociatedWithSomeoneElse}};
  spec.relation_templates = {{"for", Relation::kTrAP},
                             {"improved", Relation::kTrIP},
                             {"worsened", Relation::kTrWP},
                             {"caused", Relation::kTrCP},
                             {"withheld", Relation::kTrNAP},
                             {"showed", Relation::kTeRP},
                             {"checking", Relation::kTeCP},
                             {"with", Relation::kPIP}};
  return spec;
}

Corpus generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  SentenceBuilder builder(spec, rng);
  Corpus corpus;
  for (int s = 0; s < spec.sentences; ++s) {
    if (s % spec.sentences_per_doc == 0) {
      char id[32];
      std::snprintf(id, sizeof(id), "synth-%04d", s / spec.sentences_per_doc);
      corpus.push_back(AnnotatedDocument{});
      corpus.back().doc_id = id;
    }
    AnnotatedDocument& doc = corpus.back();
    const int sent = static_cast<int>(doc.sentences.size());
    doc.sentences.emplace_back();

    std::vector<Piece> clauses;
    const int n_clauses = rng.between(1, 2);
    for (int c = 0; c < n_clauses; ++c) {
      const bool relational = !spec.relation_templates.empty() &&
                              rng.chance(spec.relation_clause_rate);
      clauses.push_back(relational ? builder.relation_clause() : builder.mention());
    }
    int used = 0;
    for (const auto& c : clauses) used += static_cast<int>(c.tokens.size());
    // One filler slot before, between and after the clauses.
    const int slots = n_clauses + 1;
    const int target = rng.between(spec.min_len, spec.max_len);
    const int budget = std::max(n_clauses - 1, target - used);
    std::vector<int> gap(static_cast<std::size_t>(slots), 0);
    // Clauses never touch, so a trailing cue or modifier cannot attach to
    // the next clause.
    for (int g = 1; g < slots - 1; ++g) gap[static_cast<std::size_t>(g)] = 1;
    for (int left = budget - (n_clauses - 1); left > 0; --left) {
      ++gap[rng.below(gap.size())];
    }
    int offset = 0;
    for (int c = 0; c <= n_clauses; ++c) {
      append(doc, sent, builder.filler(gap[static_cast<std::size_t>(c)]), offset);
      if (c < n_clauses) append(doc, sent, clauses[static_cast<std::size_t>(c)], offset);
    }
  }
  return corpus;
}

Corpus inject_concept_noise(const Corpus& corpus, double fraction,
                            std::uint64_t seed) {
  Rng rng(seed);
  Corpus out = corpus;
  std::vector<std::pair<std::size_t, std::size_t>> refs;
  for (std::size_t d = 0; d < out.size(); ++d) {
    for (std::size_t c = 0; c < out[d].concepts.size(); ++c) refs.emplace_back(d, c);
  }
  const auto n_noisy = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(refs.size())));
  for (std::size_t i = 0; i < n_noisy && i < refs.size(); ++i) {
    std::swap(refs[i], refs[i + rng.below(refs.size() - i)]);
  }
  refs.resize(std::min(n_noisy, refs.size()));
  for (const auto& [d, c] : refs) {
    AnnotatedDocument& doc = out[d];
    ConceptSpan& span = doc.concepts[c];
    const ConceptSpan old = span;
    const int shift = 1 + static_cast<int>(rng.below(kNumConceptTypes - 1));
    span.ctype = static_cast<ConceptType>((static_cast<int>(old.ctype) + shift) % kNumConceptTypes);
    std::erase_if(doc.assertions, [&](const AssertionLabel& a) { return a.span == old; });
    if (span.ctype == ConceptType::kProblem) {
      doc.assertions.push_back(AssertionLabel{span, Assertion::kPresent});
    }
    for (auto& r : doc.relations) {
      if (r.subject == old) r.subject = span;
      if (r.object == old) r.object = span;
    }
    std::erase_if(doc.relations, [](const RelationTriple& r) {
      return r.subject.ctype != relation_subject_type(r.label) ||
             r.object.ctype != relation_object_type(r.label);
    });
  }
  return out;
}

}  // namespace jmie
