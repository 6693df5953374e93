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

#ifndef JMIE_EVALUATION_HPP_
#define JMIE_EVALUATION_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jmie/corpus.hpp"

namespace jmie {

struct StageScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // True when TP = FP = FN = 0; f1 is then reported as 0.
  bool undefined = false;

  static StageScore from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

// Exact-match micro counts over the corpus. Documents are paired by id;
// predicted duplicates are counted once.
StageScore score_concepts(const Corpus& gold, const Corpus& pred);
StageScore score_assertions(const Corpus& gold, const Corpus& pred);
StageScore score_relations(const Corpus& gold, const Corpus& pred);

enum class Protocol { kJoint, kIndependent };
std::string_view to_string(Protocol p);

struct EvalReport {
  std::string protocol = "joint";
  StageScore concept_score;
  StageScore assertion_score;
  StageScore relation_score;

  double mean_f1() const {
    return (concept_score.f1 + assertion_score.f1 + relation_score.f1) / 3.0;
  }
  // Aligned table with counts, P/R/F1 (percent, one decimal) per stage.
  std::string to_text() const;
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

// Throws CorpusMismatch when the two corpora cover different documents.
EvalReport evaluate(const Corpus& gold, const Corpus& pred, Protocol protocol);

// "+3.1" style one-decimal percentage-point difference.
std::string signed_delta(double a, double b);
// Per-stage F1 deltas a - b, one line per stage.
std::string compare_reports(const EvalReport& a, const EvalReport& b);

// Arithmetic mean of per-run precision, recall and F1 (counts summed).
EvalReport mean_report(const std::vector<EvalReport>& reports);

}  // namespace jmie

#endif  // JMIE_EVALUATION_HPP_
