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

#ifndef JMIE_TESTS_SCORER_ORACLE_HPP_
#define JMIE_TESTS_SCORER_ORACLE_HPP_

#include <algorithm>
#include <array>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "jmie/corpus.hpp"
#include "jmie/random.hpp"

namespace jmie::testing {

template <typename T>
std::vector<T> unique_of(const std::vector<T>& v) {
  std::vector<T> out;
  for (const auto& x : v) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

// Linear-scan oracle over deduplicated (doc, item) lists.
template <typename Item, typename Get>
std::array<std::size_t, 3> oracle_counts(const Corpus& gold, const Corpus& pred, Get get) {
  std::vector<std::pair<std::string, Item>> g;
  std::vector<std::pair<std::string, Item>> p;
  for (const auto& d : gold) {
    for (const auto& x : get(d)) g.emplace_back(d.doc_id, x);
  }
  for (const auto& d : pred) {
    for (const auto& x : get(d)) p.emplace_back(d.doc_id, x);
  }
  g = unique_of(g);
  p = unique_of(p);
  std::size_t tp = 0;
  for (const auto& x : p) tp += std::find(g.begin(), g.end(), x) != g.end() ? 1 : 0;
  return {tp, p.size() - tp, g.size() - tp};
}

// Relations match on span boundaries and label; types are not compared.
using RelationBounds = std::tuple<int, int, int, Relation, int, int, int>;

inline std::vector<RelationBounds> relation_bounds(const AnnotatedDocument& d) {
  std::vector<RelationBounds> out;
  for (const auto& r : d.relations) {
    out.emplace_back(r.subject.sent_index, r.subject.start_tok, r.subject.end_tok, r.label,
                     r.object.sent_index, r.object.start_tok, r.object.end_tok);
  }
  return out;
}

// Small random corpora with heavy span overlap between draws.
inline Corpus random_corpus(Random& rng, int docs) {
  Corpus c;
  for (int d = 0; d < docs; ++d) {
    AnnotatedDocument a;
    a.doc_id = "doc" + std::to_string(d);
    const int n = rng.between(0, 6);
    for (int k = 0; k < n; ++k) {
      const int start = rng.between(0, 3);
      const ConceptSpan s{rng.between(0, 1), start, start + rng.between(0, 1),
                          static_cast<ConceptType>(rng.between(0, 2))};
      a.concepts.push_back(s);
      if (s.ctype == ConceptType::kProblem) {
        a.assertions.push_back(AssertionLabel{s, static_cast<Assertion>(rng.between(0, 1))});
      }
    }
    for (std::size_t i = 0; i < a.concepts.size(); ++i) {
      for (std::size_t j = 0; j < a.concepts.size(); ++j) {
        if (i != j && rng.chance(0.2)) {
          a.relations.push_back(RelationTriple{a.concepts[j],
                                               static_cast<Relation>(rng.between(0, 2)),
                                               a.concepts[i]});
        }
      }
    }
    c.push_back(a);
  }
  return c;
}

}  // namespace jmie::testing

#endif  // JMIE_TESTS_SCORER_ORACLE_HPP_
