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

#include "jmie/labels.hpp"

#include "jmie/error.hpp"

namespace jmie {
namespace {

constexpr std::array<std::string_view, kNumConceptTypes> kConceptNames = {
    "problem", "treatment", "test"};
constexpr std::array<std::string_view, kNumAssertions> kAssertionNames = {
    "present",      "absent",       "possible",
    "conditional",  "hypothetical", "associated_with_someone_else"};
constexpr std::array<std::string_view, kNumRelations> kRelationNames = {
    "TrIP", "TrWP", "TrCP", "TrAP", "TrNAP", "TeRP", "TeCP", "PIP"};
constexpr std::array<std::string_view, kNumTags> kTagNames = {
    "O",           "B-problem", "I-problem", "B-treatment",
    "I-treatment", "B-test",    "I-test"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names,
                        std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kConceptTextMismatch: return "ConceptTextMismatch";
    case ErrorCode::kDanglingAnnotation: return "DanglingAnnotation";
    case ErrorCode::kOverlappingSpans: return "OverlappingSpans";
    case ErrorCode::kTooFewDocuments: return "TooFewDocuments";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kCorpusMismatch: return "CorpusMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kNonScalarLoss: return "NonScalarLoss";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kMissingEmbeddingEntry: return "MissingEmbeddingEntry";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRaggedLine: return "RaggedLine";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTokenCountMismatch: return "TokenCountMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kHeadOutOfRange: return "HeadOutOfRange";
    case ErrorCode::kFeatureDimMismatch: return "FeatureDimMismatch";
    case ErrorCode::kDivergedLoss: return "DivergedLoss";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(ConceptType t) {
  return kConceptNames[static_cast<int>(t)];
}
std::string_view to_string(Assertion a) {
  return kAssertionNames[static_cast<int>(a)];
}
std::string_view to_string(Relation r) {
  return kRelationNames[static_cast<int>(r)];
}
std::string_view tag_name(Tag tag) { return kTagNames.at(tag); }

std::optional<ConceptType> parse_concept_type(std::string_view s) {
  return lookup<ConceptType>(kConceptNames, s);
}
std::optional<Assertion> parse_assertion(std::string_view s) {
  return lookup<Assertion>(kAssertionNames, s);
}
std::optional<Relation> parse_relation(std::string_view s) {
  return lookup<Relation>(kRelationNames, s);
}

ConceptType relation_subject_type(Relation r) {
  switch (r) {
    case Relation::kTeRP:
    case Relation::kTeCP:
      return ConceptType::kTest;
    case Relation::kPIP:
      return ConceptType::kProblem;
    default:
      return ConceptType::kTreatment;
  }
}

}  // namespace jmie
