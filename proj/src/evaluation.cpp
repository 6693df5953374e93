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

#include "jmie/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "jmie/error.hpp"

namespace jmie {

namespace {

using SpanKey = std::tuple<int, int, int>;

SpanKey span_key(const ConceptSpan& s) { return {s.sent_index, s.start_tok, s.end_tok}; }

std::map<std::string, const AnnotatedDocument*> by_id(const Corpus& corpus) {
  std::map<std::string, const AnnotatedDocument*> out;
  for (const auto& d : corpus) out[d.doc_id] = &d;
  return out;
}

template <typename Key, typename KeysOf>
StageScore score_with(const Corpus& gold, const Corpus& pred, KeysOf keys_of) {
  std::set<std::pair<std::string, Key>> g;
  std::set<std::pair<std::string, Key>> p;
  for (const auto& d : gold) {
    for (const Key& k : keys_of(d)) g.emplace(d.doc_id, k);
  }
  for (const auto& d : pred) {
    for (const Key& k : keys_of(d)) p.emplace(d.doc_id, k);
  }
  std::size_t tp = 0;
  for (const auto& k : p) tp += g.count(k);
  return StageScore::from_counts(tp, p.size() - tp, g.size() - tp);
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

nlohmann::json stage_json(const StageScore& s) {
  return {{"tp", s.tp},
          {"fp", s.fp},
          {"fn", s.fn},
          {"precision", s.precision},
          {"recall", s.recall},
          {"f1", s.f1},
          {"undefined", s.undefined}};
}

StageScore stage_from_json(const nlohmann::json& j) {
  StageScore s;
  s.tp = j.at("tp").get<std::size_t>();
  s.fp = j.at("fp").get<std::size_t>();
  s.fn = j.at("fn").get<std::size_t>();
  s.precision = j.at("precision").get<double>();
  s.recall = j.at("recall").get<double>();
  s.f1 = j.at("f1").get<double>();
  s.undefined = j.value("undefined", false);
  return s;
}

}  // namespace

StageScore StageScore::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  StageScore s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  s.f1 = s.precision + s.recall == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  s.undefined = tp == 0 && fp == 0 && fn == 0;
  return s;
}

StageScore score_concepts(const Corpus& gold, const Corpus& pred) {
  using Key = std::tuple<SpanKey, int>;
  return score_with<Key>(gold, pred, [](const AnnotatedDocument& d) {
    std::vector<Key> keys;
    for (const auto& c : d.concepts) keys.emplace_back(span_key(c), static_cast<int>(c.ctype));
    return keys;
  });
}

StageScore score_assertions(const Corpus& gold, const Corpus& pred) {
  using Key = std::tuple<SpanKey, int, int>;
  return score_with<Key>(gold, pred, [](const AnnotatedDocument& d) {
    std::vector<Key> keys;
    for (const auto& a : d.assertions) {
      keys.emplace_back(span_key(a.span), static_cast<int>(a.span.ctype), static_cast<int>(a.label));
    }
    return keys;
  });
}

StageScore score_relations(const Corpus& gold, const Corpus& pred) {
  using Key = std::tuple<SpanKey, int, SpanKey>;
  return score_with<Key>(gold, pred, [](const AnnotatedDocument& d) {
    std::vector<Key> keys;
    for (const auto& r : d.relations) {
      keys.emplace_back(span_key(r.subject), static_cast<int>(r.label), span_key(r.object));
    }
    return keys;
  });
}

std::string_view to_string(Protocol p) {
  return p == Protocol::kJoint ? "joint" : "independent";
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  char line[160];
  out << "protocol: " << protocol << "\n";
  std::snprintf(line, sizeof line, "%-10s %7s %7s %7s %7s %7s %7s\n", "stage", "TP", "FP", "FN",
                "P", "R", "F1");
  out << line;
  const std::pair<const char*, const StageScore*> rows[] = {
      {"concept", &concept_score}, {"assertion", &assertion_score}, {"relation", &relation_score}};
  for (const auto& [name, s] : rows) {
    std::snprintf(line, sizeof line, "%-10s %7zu %7zu %7zu %7s %7s %7s%s\n", name, s->tp, s->fp,
                  s->fn, percent(s->precision).c_str(), percent(s->recall).c_str(),
                  percent(s->f1).c_str(), s->undefined ? "  (undefined)" : "");
    out << line;
  }
  out << "Concept " << percent(concept_score.f1) << " / Assertion " << percent(assertion_score.f1)
      << " / Relation " << percent(relation_score.f1) << "\n";
  return out.str();
}

nlohmann::json EvalReport::to_json() const {
  return {{"protocol", protocol},
          {"concept", stage_json(concept_score)},
          {"assertion", stage_json(assertion_score)},
          {"relation", stage_json(relation_score)}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.protocol = j.value("protocol", "joint");
  r.concept_score = stage_from_json(j.at("concept"));
  r.assertion_score = stage_from_json(j.at("assertion"));
  r.relation_score = stage_from_json(j.at("relation"));
  return r;
}

EvalReport evaluate(const Corpus& gold, const Corpus& pred, Protocol protocol) {
  const auto g = by_id(gold);
  const auto p = by_id(pred);
  std::vector<std::string> missing;
  for (const auto& [id, _] : g) {
    if (!p.count(id)) missing.push_back("missing prediction for " + id);
  }
  for (const auto& [id, _] : p) {
    if (!g.count(id)) missing.push_back("no gold document " + id);
  }
  if (!missing.empty()) {
    std::string msg = missing.front();
    if (missing.size() > 1) msg += " (and " + std::to_string(missing.size() - 1) + " more)";
    throw Error(ErrorCode::kCorpusMismatch, msg);
  }
  EvalReport r;
  r.protocol = std::string(to_string(protocol));
  r.concept_score = score_concepts(gold, pred);
  r.assertion_score = score_assertions(gold, pred);
  r.relation_score = score_relations(gold, pred);
  return r;
}

std::string signed_delta(double a, double b) {
  double d = std::round(1000.0 * (a - b)) / 10.0;
  if (d == 0.0) d = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f", d);
  return buf;
}

std::string compare_reports(const EvalReport& a, const EvalReport& b) {
  std::ostringstream out;
  out << "concept " << signed_delta(a.concept_score.f1, b.concept_score.f1) << "\n";
  out << "assertion " << signed_delta(a.assertion_score.f1, b.assertion_score.f1) << "\n";
  out << "relation " << signed_delta(a.relation_score.f1, b.relation_score.f1) << "\n";
  return out.str();
}

EvalReport mean_report(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidConfig, "mean of zero reports");
  EvalReport out;
  out.protocol = reports.front().protocol;
  auto fold = [&](StageScore EvalReport::*member) {
    StageScore acc;
    acc.undefined = true;
    for (const auto& r : reports) {
      const StageScore& s = r.*member;
      acc.tp += s.tp;
      acc.fp += s.fp;
      acc.fn += s.fn;
      acc.precision += s.precision;
      acc.recall += s.recall;
      acc.f1 += s.f1;
      acc.undefined = acc.undefined && s.undefined;
    }
    const double n = static_cast<double>(reports.size());
    acc.precision /= n;
    acc.recall /= n;
    acc.f1 /= n;
    return acc;
  };
  out.concept_score = fold(&EvalReport::concept_score);
  out.assertion_score = fold(&EvalReport::assertion_score);
  out.relation_score = fold(&EvalReport::relation_score);
  return out;
}

}  // namespace jmie
