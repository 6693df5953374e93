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

#ifndef JMIE_SYNTH_HPP_
#define JMIE_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "jmie/corpus.hpp"

namespace jmie {

struct AssertionCue {
  std::string word;
  Assertion label;
};

// A connector word placed between a subject and an object problem phrase.
struct RelationTemplate {
  std::string connector;
  Relation label;
};

// Surface grammar for a synthetic report collection. Every annotation is a
// deterministic function of the surface tokens:
//   * head words from a type's list end a concept of that type, and an
//     optional modifier from the same type's list starts it;
//   * a cue word directly before a problem phrase sets its assertion
//     (no cue means present);
//   * "<subject phrase> <connector> [cue] <problem phrase>" carries the
//     connector's relation from subject to the problem.
struct SynthSpec {
  int sentences = 200;
  int sentences_per_doc = 10;
  int min_len = 6;
  int max_len = 14;
  double relation_clause_rate = 0.6;
  double modifier_rate = 0.35;
  double cue_rate = 0.5;

  std::vector<std::string> fillers;
  std::vector<std::string> problem_words;
  std::vector<std::string> problem_modifiers;
  std::vector<std::string> treatment_words;
  std::vector<std::string> treatment_modifiers;
  std::vector<std::string> test_words;
  std::vector<std::string> test_modifiers;
  std::vector<AssertionCue> assertion_cues;
  std::vector<RelationTemplate> relation_templates;

  static SynthSpec defaults();
};

// Throws Error(kInvalidSpec) for empty vocabularies, bad ranges, or words
// shared between roles.
Corpus generate_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed);

// Reassigns the concept type of round(fraction * |concepts|) randomly chosen
// concepts. Assertions and relations are repaired so gold invariants still
// hold: new problems get "present", stale assertions and category-violating
// relations are dropped.
Corpus inject_concept_noise(const Corpus& corpus, double fraction,
                            std::uint64_t seed);

}  // namespace jmie

#endif  // JMIE_SYNTH_HPP_
