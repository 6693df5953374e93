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

#ifndef JMIE_LABELS_HPP_
#define JMIE_LABELS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace jmie {

enum class ConceptType : std::uint8_t { kProblem = 0, kTreatment = 1, kTest = 2 };
inline constexpr int kNumConceptTypes = 3;

enum class Assertion : std::uint8_t {
  kPresent = 0,
  kAbsent,
  kPossible,
  kConditional,
  kHypothetical,
  kAssociatedWithSomeoneElse,
};
inline constexpr int kNumAssertions = 6;
// Row used in the assertion-label embedding for tokens without an assertion.
inline constexpr int kAssertionNone = kNumAssertions;

enum class Relation : std::uint8_t {
  kTrIP = 0,
  kTrWP,
  kTrCP,
  kTrAP,
  kTrNAP,
  kTeRP,
  kTeCP,
  kPIP,
};
inline constexpr int kNumRelations = 8;
// Index of the no-relation class in relation classifiers (after the 8 labels).
inline constexpr int kNoLink = kNumRelations;
inline constexpr int kNumRelationClasses = kNumRelations + 1;

// BIO tag inventory: O, then B/I pairs for problem, treatment, test.
using Tag = int;
inline constexpr Tag kTagO = 0;
inline constexpr int kNumTags = 1 + 2 * kNumConceptTypes;

constexpr Tag begin_tag(ConceptType t) { return 1 + 2 * static_cast<int>(t); }
constexpr Tag inside_tag(ConceptType t) { return 2 + 2 * static_cast<int>(t); }
constexpr bool is_begin(Tag tag) { return tag > 0 && tag % 2 == 1; }
constexpr bool is_inside(Tag tag) { return tag > 0 && tag % 2 == 0; }
constexpr ConceptType tag_type(Tag tag) {
  return static_cast<ConceptType>((tag - 1) / 2);
}

std::string_view to_string(ConceptType t);
std::string_view to_string(Assertion a);
std::string_view to_string(Relation r);
std::string_view tag_name(Tag tag);

std::optional<ConceptType> parse_concept_type(std::string_view s);
std::optional<Assertion> parse_assertion(std::string_view s);
std::optional<Relation> parse_relation(std::string_view s);

// Concept type the relation's subject must have; the object is always a
// problem in the i2b2 scheme.
ConceptType relation_subject_type(Relation r);
constexpr ConceptType relation_object_type(Relation) {
  return ConceptType::kProblem;
}

}  // namespace jmie

#endif  // JMIE_LABELS_HPP_
