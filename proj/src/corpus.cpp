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

#include "jmie/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "jmie/error.hpp"
#include "jmie/log.hpp"

namespace jmie {
namespace fs = std::filesystem;
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize_ws(std::string_view s) {
  std::string out;
  for (const auto& tok : tokenize(s)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find("||", pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 2;
  }
  return fields;
}

struct LineContext {
  std::string_view file;
  int line_no;
};

[[noreturn]] void malformed(const LineContext& ctx, const std::string& why) {
  throw Error(ErrorCode::kMalformedLine, std::string(ctx.file) + " line " +
                                            std::to_string(ctx.line_no) +
                                            ": " + why);
}

int parse_int(const LineContext& ctx, std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    malformed(ctx, "expected integer, got '" + std::string(s) + "'");
  }
  return value;
}

// key="value"
std::string_view parse_quoted(const LineContext& ctx, std::string_view field,
                              std::string_view key) {
  field = trim(field);
  const std::string prefix = std::string(key) + "=\"";
  if (field.substr(0, prefix.size()) != prefix || field.size() < prefix.size() + 1 ||
      field.back() != '"') {
    malformed(ctx, "expected " + std::string(key) + "=\"...\"");
  }
  return field.substr(prefix.size(), field.size() - prefix.size() - 1);
}

struct RawConcept {
  std::string text;
  int line = 0;   // 1-based
  int start = 0;
  int end = 0;
};

// c="<text>" L:S L:E
RawConcept parse_concept_field(const LineContext& ctx, std::string_view field) {
  field = trim(field);
  if (field.substr(0, 3) != "c=\"") malformed(ctx, "expected c=\"...\"");
  const std::size_t close = field.rfind('"');
  if (close <= 2) malformed(ctx, "unterminated concept text");
  RawConcept raw;
  raw.text = std::string(field.substr(3, close - 3));
  const auto offsets = tokenize(field.substr(close + 1));
  if (offsets.size() != 2) malformed(ctx, "expected two L:T offsets");
  int lines[2];
  int toks[2];
  for (int k = 0; k < 2; ++k) {
    const std::string_view o = offsets[static_cast<std::size_t>(k)];
    const std::size_t colon = o.find(':');
    if (colon == std::string_view::npos) malformed(ctx, "offset without ':'");
    lines[k] = parse_int(ctx, o.substr(0, colon));
    toks[k] = parse_int(ctx, o.substr(colon + 1));
  }
  if (lines[0] != lines[1]) malformed(ctx, "concept spans multiple lines");
  raw.line = lines[0];
  raw.start = toks[0];
  raw.end = toks[1];
  return raw;
}

class DocumentBuilder {
 public:
  explicit DocumentBuilder(AnnotatedDocument& doc) : doc_(doc) {}

  ConceptSpan resolve(const LineContext& ctx, const RawConcept& raw,
                      ConceptType type) const {
    const int sent = raw.line - 1;
    if (sent < 0 || sent >= static_cast<int>(doc_.sentences.size())) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  std::string(ctx.file) + " line " + std::to_string(ctx.line_no) +
                      ": text line " + std::to_string(raw.line) +
                      " does not exist");
    }
    const int len = static_cast<int>(doc_.sentences[static_cast<std::size_t>(sent)].size());
    if (raw.start < 0 || raw.end < raw.start || raw.end >= len) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  std::string(ctx.file) + " line " + std::to_string(ctx.line_no) +
                      ": tokens " + std::to_string(raw.start) + ".." +
                      std::to_string(raw.end) + " outside sentence of length " +
                      std::to_string(len));
    }
    std::string covered;
    for (int t = raw.start; t <= raw.end; ++t) {
      if (!covered.empty()) covered += ' ';
      covered += doc_.sentences[static_cast<std::size_t>(sent)][static_cast<std::size_t>(t)].text;
    }
    if (lowercase(covered) != lowercase(normalize_ws(raw.text))) {
      throw Error(ErrorCode::kConceptTextMismatch,
                  std::string(ctx.file) + " line " + std::to_string(ctx.line_no) +
                      ": annotation text '" + raw.text + "' but tokens read '" +
                      covered + "'");
    }
    return ConceptSpan{sent, raw.start, raw.end, type};
  }

  const ConceptSpan* find(const ConceptSpan& extent) const {
    for (const auto& c : doc_.concepts) {
      if (c.same_extent(extent)) return &c;
    }
    return nullptr;
  }

 private:
  AnnotatedDocument& doc_;
};

void check_no_overlap(std::vector<ConceptSpan> spans) {
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    const auto& a = spans[i - 1];
    const auto& b = spans[i];
    if (a.sent_index == b.sent_index && b.start_tok <= a.end_tok) {
      throw Error(ErrorCode::kOverlappingSpans,
                  "concepts overlap in sentence " + std::to_string(a.sent_index) +
                      " at tokens " + std::to_string(a.start_tok) + ".." +
                      std::to_string(a.end_tok) + " and " +
                      std::to_string(b.start_tok) + ".." +
                      std::to_string(b.end_tok));
    }
  }
}

template <typename F>
void for_each_line(std::string_view content, F&& fn) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, line);
    if (end == content.size()) break;
    pos = end + 1;
  }
}

std::string concept_text(const AnnotatedDocument& doc, const ConceptSpan& c) {
  std::string text;
  const auto& sent = doc.sentences.at(static_cast<std::size_t>(c.sent_index));
  for (int t = c.start_tok; t <= c.end_tok; ++t) {
    if (!text.empty()) text += ' ';
    text += sent.at(static_cast<std::size_t>(t)).text;
  }
  return lowercase(text);
}

std::string concept_ref(const AnnotatedDocument& doc, const ConceptSpan& c) {
  const int line = c.sent_index + 1;
  return "c=\"" + concept_text(doc, c) + "\" " + std::to_string(line) + ":" +
         std::to_string(c.start_tok) + " " + std::to_string(line) + ":" +
         std::to_string(c.end_tok);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_optional(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return read_file(path);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
}

void collect_layout_dirs(const fs::path& dir, std::vector<fs::path>& out) {
  if (fs::is_directory(dir / "txt")) {
    out.push_back(dir);
    return;
  }
  std::vector<fs::path> children;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) children.push_back(entry.path());
  }
  std::sort(children.begin(), children.end());
  for (const auto& child : children) collect_layout_dirs(child, out);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

AnnotatedDocument parse_document(std::string doc_id, std::string_view text,
                                 std::string_view con, std::string_view ast,
                                 std::string_view rel) {
  AnnotatedDocument doc;
  doc.doc_id = std::move(doc_id);

  // A trailing newline terminates the last line rather than opening a new one.
  if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
  if (!text.empty()) {
    for_each_line(text, [&](int line_no, std::string_view line) {
      Sentence sent;
      const int s = line_no - 1;
      int t = 0;
      for (auto& tok : tokenize(line)) sent.push_back(Token{std::move(tok), s, t++});
      doc.sentences.push_back(std::move(sent));
    });
  }

  DocumentBuilder builder(doc);
  const std::string con_name = doc.doc_id + ".con";
  for_each_line(con, [&](int line_no, std::string_view line) {
    if (trim(line).empty()) return;
    const LineContext ctx{con_name, line_no};
    const auto fields = split_fields(line);
    if (fields.size() != 2) malformed(ctx, "concept line needs 2 fields");
    const RawConcept raw = parse_concept_field(ctx, fields[0]);
    const auto type = parse_concept_type(parse_quoted(ctx, fields[1], "t"));
    if (!type) malformed(ctx, "unknown concept type");
    doc.concepts.push_back(builder.resolve(ctx, raw, *type));
  });
  check_no_overlap(doc.concepts);

  const std::string ast_name = doc.doc_id + ".ast";
  std::set<ConceptSpan> asserted;
  for_each_line(ast, [&](int line_no, std::string_view line) {
    if (trim(line).empty()) return;
    const LineContext ctx{ast_name, line_no};
    const auto fields = split_fields(line);
    if (fields.size() != 3) malformed(ctx, "assertion line needs 3 fields");
    const RawConcept raw = parse_concept_field(ctx, fields[0]);
    const auto type = parse_concept_type(parse_quoted(ctx, fields[1], "t"));
    if (!type) malformed(ctx, "unknown concept type");
    if (*type != ConceptType::kProblem) {
      malformed(ctx, "assertion on a non-problem concept");
    }
    const auto label = parse_assertion(parse_quoted(ctx, fields[2], "a"));
    if (!label) malformed(ctx, "unknown assertion label");
    const ConceptSpan extent = builder.resolve(ctx, raw, *type);
    const ConceptSpan* span = builder.find(extent);
    if (span == nullptr) {
      throw Error(ErrorCode::kDanglingAnnotation,
                  ast_name + " line " + std::to_string(line_no) +
                      ": assertion references a concept absent from .con");
    }
    if (span->ctype != ConceptType::kProblem) {
      malformed(ctx, "assertion on a concept annotated as " +
                         std::string(to_string(span->ctype)));
    }
    if (!asserted.insert(*span).second) {
      malformed(ctx, "second assertion for the same concept");
    }
    doc.assertions.push_back(AssertionLabel{*span, *label});
  });

  const std::string rel_name = doc.doc_id + ".rel";
  for_each_line(rel, [&](int line_no, std::string_view line) {
    if (trim(line).empty()) return;
    const LineContext ctx{rel_name, line_no};
    const auto fields = split_fields(line);
    if (fields.size() != 3) malformed(ctx, "relation line needs 3 fields");
    const RawConcept raw_subj = parse_concept_field(ctx, fields[0]);
    const auto label = parse_relation(parse_quoted(ctx, fields[1], "r"));
    if (!label) malformed(ctx, "unknown relation label");
    const RawConcept raw_obj = parse_concept_field(ctx, fields[2]);
    const ConceptSpan* subj = builder.find(builder.resolve(ctx, raw_subj, ConceptType::kProblem));
    const ConceptSpan* obj = builder.find(builder.resolve(ctx, raw_obj, ConceptType::kProblem));
    if (subj == nullptr || obj == nullptr) {
      throw Error(ErrorCode::kDanglingAnnotation,
                  rel_name + " line " + std::to_string(line_no) +
                      ": relation references a concept absent from .con");
    }
    if (subj->same_extent(*obj)) malformed(ctx, "relation from a concept to itself");
    if (subj->ctype != relation_subject_type(*label) ||
        obj->ctype != relation_object_type(*label)) {
      malformed(ctx, std::string(to_string(*label)) + " cannot link " +
                         std::string(to_string(subj->ctype)) + " to " +
                         std::string(to_string(obj->ctype)));
    }
    if (subj->sent_index != obj->sent_index) {
      ++doc.dropped_cross_sentence;
      return;
    }
    doc.relations.push_back(RelationTriple{*subj, *label, *obj});
  });
  if (doc.dropped_cross_sentence > 0) {
    log(LogLevel::kWarn, doc.doc_id, ": dropped ", doc.dropped_cross_sentence,
        " cross-sentence relation(s)");
  }
  return doc;
}

std::string serialize_text(const AnnotatedDocument& doc) {
  std::string out;
  for (const auto& sent : doc.sentences) {
    bool first = true;
    for (const auto& tok : sent) {
      if (!first) out += ' ';
      out += tok.text;
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::string serialize_concepts(const AnnotatedDocument& doc) {
  auto concepts = doc.concepts;
  std::sort(concepts.begin(), concepts.end());
  std::string out;
  for (const auto& c : concepts) {
    out += concept_ref(doc, c) + "||t=\"" + std::string(to_string(c.ctype)) + "\"\n";
  }
  return out;
}

std::string serialize_assertions(const AnnotatedDocument& doc) {
  auto assertions = doc.assertions;
  std::sort(assertions.begin(), assertions.end());
  std::string out;
  for (const auto& a : assertions) {
    out += concept_ref(doc, a.span) + "||t=\"" +
           std::string(to_string(a.span.ctype)) + "\"||a=\"" +
           std::string(to_string(a.label)) + "\"\n";
  }
  return out;
}

std::string serialize_relations(const AnnotatedDocument& doc) {
  auto relations = doc.relations;
  std::sort(relations.begin(), relations.end());
  std::string out;
  for (const auto& r : relations) {
    out += concept_ref(doc, r.subject) + "||r=\"" +
           std::string(to_string(r.label)) + "\"||" +
           concept_ref(doc, r.object) + "\n";
  }
  return out;
}

void check_gold_invariants(const AnnotatedDocument& doc) {
  for (const auto& c : doc.concepts) {
    if (c.sent_index < 0 || c.sent_index >= static_cast<int>(doc.sentences.size()) ||
        c.start_tok < 0 || c.end_tok < c.start_tok ||
        c.end_tok >= static_cast<int>(doc.sentence_length(c.sent_index))) {
      throw Error(ErrorCode::kIndexOutOfRange, doc.doc_id + ": concept out of range");
    }
  }
  check_no_overlap(doc.concepts);
  std::map<ConceptSpan, int> assertion_count;
  for (const auto& a : doc.assertions) {
    if (a.span.ctype != ConceptType::kProblem) {
      throw Error(ErrorCode::kMalformedLine,
                  doc.doc_id + ": assertion on a non-problem concept");
    }
    if (std::find(doc.concepts.begin(), doc.concepts.end(), a.span) ==
        doc.concepts.end()) {
      throw Error(ErrorCode::kDanglingAnnotation,
                  doc.doc_id + ": assertion on a missing concept");
    }
    ++assertion_count[a.span];
  }
  for (const auto& c : doc.concepts) {
    if (c.ctype == ConceptType::kProblem && assertion_count[c] != 1) {
      throw Error(ErrorCode::kDanglingAnnotation,
                  doc.doc_id + ": problem concept at sentence " +
                      std::to_string(c.sent_index) + " token " +
                      std::to_string(c.start_tok) + " has " +
                      std::to_string(assertion_count[c]) + " assertions");
    }
  }
  for (const auto& r : doc.relations) {
    const bool known =
        std::find(doc.concepts.begin(), doc.concepts.end(), r.subject) != doc.concepts.end() &&
        std::find(doc.concepts.begin(), doc.concepts.end(), r.object) != doc.concepts.end();
    if (!known) {
      throw Error(ErrorCode::kDanglingAnnotation,
                  doc.doc_id + ": relation on a missing concept");
    }
    if (r.subject.sent_index != r.object.sent_index || r.subject == r.object ||
        r.subject.ctype != relation_subject_type(r.label) ||
        r.object.ctype != relation_object_type(r.label)) {
      throw Error(ErrorCode::kMalformedLine,
                  doc.doc_id + ": relation violates the i2b2 category scheme");
    }
  }
}

std::vector<SentenceAnnotations> group_by_sentence(const AnnotatedDocument& doc) {
  std::vector<SentenceAnnotations> out(doc.sentences.size());
  for (const auto& c : doc.concepts) {
    out.at(static_cast<std::size_t>(c.sent_index)).concepts.push_back(c);
  }
  for (const auto& a : doc.assertions) {
    out.at(static_cast<std::size_t>(a.span.sent_index)).assertions.push_back(a);
  }
  for (const auto& r : doc.relations) {
    out.at(static_cast<std::size_t>(r.subject.sent_index)).relations.push_back(r);
  }
  for (auto& s : out) {
    std::sort(s.concepts.begin(), s.concepts.end());
    std::sort(s.assertions.begin(), s.assertions.end());
    std::sort(s.relations.begin(), s.relations.end());
  }
  return out;
}

Corpus load_corpus(const fs::path& dir, int jobs) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  }
  std::vector<fs::path> roots;
  collect_layout_dirs(dir, roots);
  struct Job {
    fs::path root;
    std::string id;
  };
  std::vector<Job> work;
  for (const auto& root : roots) {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(root / "txt")) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        ids.push_back(entry.path().stem().string());
      }
    }
    std::sort(ids.begin(), ids.end());
    for (auto& id : ids) work.push_back({root, std::move(id)});
  }
  auto parse_one = [](const Job& job) {
    return parse_document(job.id, read_file(job.root / "txt" / (job.id + ".txt")),
                          read_optional(job.root / "concept" / (job.id + ".con")),
                          read_optional(job.root / "ast" / (job.id + ".ast")),
                          read_optional(job.root / "rel" / (job.id + ".rel")));
  };
  Corpus corpus(work.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1) {
    for (std::size_t i = 0; i < work.size(); ++i) corpus[i] = parse_one(work[i]);
  } else {
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < work.size(); i += workers) {
          corpus[i] = parse_one(work[i]);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }
  std::size_t dropped = 0;
  for (const auto& d : corpus) dropped += d.dropped_cross_sentence;
  if (dropped > 0) {
    log(LogLevel::kWarn, dir.string(), ": ", dropped,
        " cross-sentence relation(s) dropped in total");
  }
  return corpus;
}

void write_document(const AnnotatedDocument& doc, const fs::path& dir) {
  for (const char* sub : {"txt", "concept", "ast", "rel"}) {
    fs::create_directories(dir / sub);
  }
  write_file(dir / "txt" / (doc.doc_id + ".txt"), serialize_text(doc));
  write_file(dir / "concept" / (doc.doc_id + ".con"), serialize_concepts(doc));
  write_file(dir / "ast" / (doc.doc_id + ".ast"), serialize_assertions(doc));
  write_file(dir / "rel" / (doc.doc_id + ".rel"), serialize_relations(doc));
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  for (const char* sub : {"txt", "concept", "ast", "rel"}) {
    fs::create_directories(dir / sub);
  }
  for (const auto& doc : corpus) write_document(doc, dir);
}

TagSequence spans_to_bio(std::size_t sentence_len,
                         const std::vector<ConceptSpan>& spans) {
  TagSequence tags(sentence_len, kTagO);
  std::vector<bool> covered(sentence_len, false);
  for (const auto& s : spans) {
    if (s.start_tok < 0 || s.end_tok < s.start_tok ||
        static_cast<std::size_t>(s.end_tok) >= sentence_len) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "span " + std::to_string(s.start_tok) + ".." +
                      std::to_string(s.end_tok) + " outside sentence of length " +
                      std::to_string(sentence_len));
    }
    for (int t = s.start_tok; t <= s.end_tok; ++t) {
      if (covered[static_cast<std::size_t>(t)]) {
        throw Error(ErrorCode::kOverlappingSpans,
                    "token " + std::to_string(t) + " covered twice");
      }
      covered[static_cast<std::size_t>(t)] = true;
      tags[static_cast<std::size_t>(t)] =
          t == s.start_tok ? begin_tag(s.ctype) : inside_tag(s.ctype);
    }
  }
  return tags;
}

std::vector<ConceptSpan> bio_to_spans(const TagSequence& tags, int sent_index) {
  std::vector<ConceptSpan> spans;
  bool open = false;
  ConceptSpan current;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag tag = tags[i];
    const int pos = static_cast<int>(i);
    if (is_inside(tag) && open && current.ctype == tag_type(tag)) {
      current.end_tok = pos;
      continue;
    }
    if (open) spans.push_back(current);
    open = false;
    if (is_begin(tag) || is_inside(tag)) {
      current = ConceptSpan{sent_index, pos, pos, tag_type(tag)};
      open = true;
    }
  }
  if (open) spans.push_back(current);
  return spans;
}

TrainDevSplit split_train_dev(const Corpus& corpus, double fraction,
                              std::uint64_t seed) {
  if (corpus.size() < 10) {
    throw Error(ErrorCode::kTooFewDocuments,
                "need at least 10 documents to split, got " +
                    std::to_string(corpus.size()));
  }
  const std::size_t n = corpus.size();
  const auto n_dev = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Fisher-Yates on the raw engine output keeps the split identical across
  // standard library implementations.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng() % (i + 1)]);
  }
  std::vector<std::size_t> dev_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_dev));
  std::sort(dev_idx.begin(), dev_idx.end());
  TrainDevSplit split;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < dev_idx.size() && dev_idx[k] == i) {
      split.dev.push_back(corpus[i]);
      ++k;
    } else {
      split.train.push_back(corpus[i]);
    }
  }
  return split;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.documents = corpus.size();
  for (const auto& doc : corpus) {
    stats.sentences += doc.sentences.size();
    for (const auto& s : doc.sentences) stats.tokens += s.size();
    stats.concepts += doc.concepts.size();
    stats.assertions += doc.assertions.size();
    stats.relations += doc.relations.size();
  }
  return stats;
}

}  // namespace jmie
