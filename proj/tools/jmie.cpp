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

// Command-line entry point: train, predict, evaluate, synth, inspect, convert.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jmie/corpus.hpp"
#include "jmie/encoder.hpp"
#include "jmie/error.hpp"
#include "jmie/evaluation.hpp"
#include "jmie/log.hpp"
#include "jmie/synth.hpp"
#include "jmie/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw jmie::Error(jmie::ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw jmie::Error(jmie::ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string underscored(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

// key=value lines, '#' comments. Keys may use '-' or '_'.
std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[underscored(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return out;
}

// Flags that are plain strings on the command line and keys in --config.
class FlagSet {
 public:
  void add(CLI::App* app, const std::string& key, const std::string& help) {
    app->add_option("--" + dashed(key), values_[key], help);
    keys_.push_back(key);
  }
  void add_flag(CLI::App* app, const std::string& key, const std::string& help) {
    app->add_flag_callback("--" + dashed(key), [this, key] { values_[key] = "true"; }, help);
    keys_.push_back(key);
  }
  // Config values fill keys not given on the command line.
  void apply_config(const std::optional<std::string>& config) {
    if (!config) return;
    for (const auto& [k, v] : read_key_values(*config)) {
      if (std::find(keys_.begin(), keys_.end(), k) == keys_.end()) {
        throw UsageError("unknown key '" + k + "' in " + *config);
      }
      if (values_[k].empty()) values_[k] = v;
    }
  }
  std::string get(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? std::string() : it->second;
  }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> keys_;
};

std::string require(const FlagSet& flags, const std::string& key) {
  std::string v = flags.get(key);
  if (v.empty()) throw UsageError("--" + dashed(key) + " is required");
  return v;
}

int jobs_of(const FlagSet& flags) {
  const std::string v = flags.get("jobs");
  if (v.empty()) return 1;
  try {
    return std::max(1, std::stoi(v));
  } catch (const std::exception&) {
    throw UsageError("--jobs expects an integer");
  }
}

bool is_jemb(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[5] = {};
  in.read(magic, 5);
  return in.gcount() == 5 && std::string(magic, 5) == "JEMB1";
}

struct Embeddings {
  std::optional<jmie::EmbeddingTable> table;
  std::optional<jmie::PrecomputedEmbeddings> precomputed;
};

Embeddings load_embeddings(const std::string& path, jmie::EncoderMode mode) {
  Embeddings e;
  const bool contextual = mode != jmie::EncoderMode::kTrainableLstm;
  if (path.empty()) {
    if (contextual) throw UsageError("--encoder " + std::string(to_string(mode)) + " needs --embeddings FILE.jemb");
    return e;
  }
  if (is_jemb(path)) {
    if (!contextual) throw UsageError("a JEMB1 file needs --encoder precomputed or precomputed+lstm");
    e.precomputed = jmie::load_precomputed(path);
  } else {
    if (contextual) throw UsageError("--encoder " + std::string(to_string(mode)) + " needs a JEMB1 file, got word vectors");
    e.table = jmie::load_word_vectors(path);
  }
  return e;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw UsageError("--seeds expects a comma-separated list of integers");
    }
  }
  return out;
}

void write_report(const jmie::EvalReport& r, const fs::path& dir, const std::string& stem) {
  write_file(dir / (stem + ".json"), r.to_json().dump(2) + "\n");
  write_file(dir / (stem + ".txt"), r.to_text());
}

// ---------------------------------------------------------------------------

int run_train(const FlagSet& flags) {
  jmie::TrainConfig config;
  for (const auto& key : jmie::train_config_keys()) {
    const std::string v = flags.get(key);
    if (!v.empty()) config.set(key, v);
  }
  const fs::path out = require(flags, "out");
  const int jobs = jobs_of(flags);
  const jmie::Corpus corpus = jmie::load_corpus(require(flags, "train_dir"), jobs);
  std::optional<jmie::Corpus> test;
  if (!flags.get("test_dir").empty()) test = jmie::load_corpus(flags.get("test_dir"), jobs);
  const Embeddings emb = load_embeddings(flags.get("embeddings"), config.encoder);

  jmie::TrainInputs inputs;
  if (emb.table) inputs.pretrained = &*emb.table;
  if (emb.precomputed) {
    inputs.precomputed = &*emb.precomputed;
    if (test) emb.precomputed->check_against(*test);
  }
  if (test) inputs.vocabulary_corpora.push_back(&*test);

  std::vector<std::uint64_t> seeds = {config.seed};
  if (!flags.get("seeds").empty()) seeds = parse_seeds(flags.get("seeds"));

  std::vector<jmie::EvalReport> test_reports;
  for (std::uint64_t seed : seeds) {
    config.seed = seed;
    const fs::path dir = seeds.size() > 1 ? out / ("seed-" + std::to_string(seed)) : out;
    fs::create_directories(dir);
    const jmie::TrainResult result = jmie::train(corpus, config, inputs);
    result.model.save(dir);
    jmie::write_run_records(result.records, dir / "run_record.jsonl");
    write_report(result.dev_report, dir, "dev_report");
    char timing[64];
    std::snprintf(timing, sizeof timing, "wall_seconds=%.3f\n", result.wall_seconds);
    write_file(dir / "timing.txt", timing);
    std::cout << "seed " << seed << ": best epoch " << result.best_epoch << " of "
              << result.epochs_run << "\n"
              << result.dev_report.to_text();
    if (test) {
      const jmie::Corpus pred =
          jmie::predict_corpus(result.model, *test, inputs.precomputed, {}, jobs);
      const jmie::EvalReport r = jmie::evaluate(*test, pred, jmie::Protocol::kJoint);
      write_report(r, dir, "test_report");
      std::cout << "test:\n" << r.to_text();
      test_reports.push_back(r);
    }
  }
  if (seeds.size() > 1 && !test_reports.empty()) {
    const jmie::EvalReport mean = jmie::mean_report(test_reports);
    write_report(mean, out, "mean_test_report");
    std::cout << "mean over " << seeds.size() << " seeds:\n" << mean.to_text();
  }
  return 0;
}

int run_predict(const FlagSet& flags, const std::vector<std::string>& inject_gold,
                bool debug_scores) {
  const jmie::TrainedModel model = jmie::TrainedModel::load(require(flags, "model"));
  const fs::path out = require(flags, "out");
  const int jobs = jobs_of(flags);
  const jmie::Corpus corpus = jmie::load_corpus(require(flags, "test_dir"), jobs);
  const Embeddings emb = load_embeddings(flags.get("embeddings"), model.config.encoder);
  const jmie::PrecomputedEmbeddings* precomputed = emb.precomputed ? &*emb.precomputed : nullptr;
  if (precomputed) precomputed->check_against(corpus);

  jmie::GoldInjection inject;
  for (const auto& stage : inject_gold) {
    if (stage == "concept") {
      inject.concepts = true;
    } else if (stage == "assertion") {
      inject.assertions = true;
    } else {
      throw UsageError("--inject-gold takes concept or assertion, got '" + stage + "'");
    }
  }
  const jmie::Corpus pred = jmie::predict_corpus(model, corpus, precomputed, inject, jobs);
  jmie::write_corpus(pred, out);
  if (debug_scores) {
    if (!model.joint) throw UsageError("--debug-scores needs a joint model");
    std::ofstream dbg(out / "debug_scores.jsonl", std::ios::binary);
    for (const auto& ex : jmie::make_examples(corpus, model.encoder(), precomputed)) {
      dbg << model.joint->debug_scores(ex) << "\n";
    }
  }
  std::cout << "wrote predictions for " << pred.size() << " documents to " << out.string() << "\n";
  return 0;
}

int run_evaluate(const FlagSet& flags, const std::vector<std::string>& compare) {
  if (!compare.empty()) {
    if (compare.size() != 2) throw UsageError("--compare takes two report files");
    const auto a = jmie::EvalReport::from_json(nlohmann::json::parse(read_file(compare[0])));
    const auto b = jmie::EvalReport::from_json(nlohmann::json::parse(read_file(compare[1])));
    std::cout << jmie::compare_reports(a, b);
    return 0;
  }
  const int jobs = jobs_of(flags);
  const std::string protocol_name = flags.get("protocol").empty() ? "joint" : flags.get("protocol");
  jmie::Protocol protocol;
  if (protocol_name == "joint") {
    protocol = jmie::Protocol::kJoint;
  } else if (protocol_name == "independent") {
    protocol = jmie::Protocol::kIndependent;
  } else {
    throw UsageError("--protocol takes joint or independent");
  }
  const jmie::Corpus gold = jmie::load_corpus(require(flags, "gold"), jobs);
  const jmie::Corpus pred = jmie::load_corpus(require(flags, "pred"), jobs);
  const jmie::EvalReport report = jmie::evaluate(gold, pred, protocol);
  std::cout << report.to_text();
  if (!flags.get("out").empty()) {
    fs::create_directories(flags.get("out"));
    write_report(report, flags.get("out"), "report");
  }
  return 0;
}

int run_synth(const FlagSet& flags) {
  jmie::SynthSpec spec = jmie::SynthSpec::defaults();
  auto int_flag = [&](const std::string& key, int fallback) {
    const std::string v = flags.get(key);
    if (v.empty()) return fallback;
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw UsageError("--" + dashed(key) + " expects an integer");
    }
  };
  spec.sentences = int_flag("sentences", spec.sentences);
  spec.sentences_per_doc = int_flag("sentences_per_doc", spec.sentences_per_doc);
  const std::uint64_t seed = static_cast<std::uint64_t>(int_flag("seed", 7));
  jmie::Corpus corpus = jmie::generate_synthetic_corpus(spec, seed);
  if (!flags.get("noise").empty()) {
    double noise = 0.0;
    try {
      noise = std::stod(flags.get("noise"));
    } catch (const std::exception&) {
      throw UsageError("--noise expects a fraction");
    }
    corpus = jmie::inject_concept_noise(corpus, noise, seed);
  }
  const fs::path out = require(flags, "out");
  jmie::write_corpus(corpus, out);
  const auto stats = jmie::corpus_stats(corpus);
  std::cout << "wrote " << stats.documents << " documents, " << stats.sentences
            << " sentences to " << out.string() << "\n";
  return 0;
}

std::string grouped(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

int run_inspect(const FlagSet& flags, const std::vector<std::string>& dirs) {
  const int jobs = jobs_of(flags);
  std::vector<std::pair<std::string, jmie::CorpusStats>> columns;
  if (!flags.get("train_dir").empty()) {
    columns.emplace_back("Training", jmie::corpus_stats(jmie::load_corpus(flags.get("train_dir"), jobs)));
  }
  if (!flags.get("test_dir").empty()) {
    columns.emplace_back("Test", jmie::corpus_stats(jmie::load_corpus(flags.get("test_dir"), jobs)));
  }
  for (const auto& d : dirs) {
    columns.emplace_back(fs::path(d).filename().string(), jmie::corpus_stats(jmie::load_corpus(d, jobs)));
  }
  if (columns.empty()) throw UsageError("inspect needs --train-dir, --test-dir or a directory");
  char line[256];
  std::string header;
  std::snprintf(line, sizeof line, "%-12s", "");
  header = line;
  for (const auto& [name, _] : columns) {
    std::snprintf(line, sizeof line, " %12s", name.c_str());
    header += line;
  }
  std::cout << header << "\n";
  const std::pair<const char*, std::size_t jmie::CorpusStats::*> rows[] = {
      {"#Doc", &jmie::CorpusStats::documents},
      {"#Concept", &jmie::CorpusStats::concepts},
      {"#Assertion", &jmie::CorpusStats::assertions},
      {"#Relation", &jmie::CorpusStats::relations},
      {"#Sentence", &jmie::CorpusStats::sentences},
      {"#Token", &jmie::CorpusStats::tokens},
  };
  for (const auto& [label, member] : rows) {
    std::snprintf(line, sizeof line, "%-12s", label);
    std::string row = line;
    for (const auto& [_, stats] : columns) {
      std::snprintf(line, sizeof line, " %12s", grouped(stats.*member).c_str());
      row += line;
    }
    std::cout << row << "\n";
  }
  return 0;
}

int run_convert(const FlagSet& flags) {
  const jmie::Corpus corpus = jmie::load_corpus(require(flags, "in"), jobs_of(flags));
  const fs::path out = require(flags, "out");
  jmie::write_corpus(corpus, out);
  std::size_t dropped = 0;
  for (const auto& d : corpus) dropped += d.dropped_cross_sentence;
  std::cout << "converted " << corpus.size() << " documents to " << out.string();
  if (dropped > 0) std::cout << " (" << dropped << " cross-sentence relations dropped)";
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint clinical concept, assertion and relation extraction"};
  app.require_subcommand(1, 1);

  std::optional<std::string> config_path;
  std::vector<std::string> inject_gold;
  std::vector<std::string> compare;
  std::vector<std::string> inspect_dirs;
  bool debug_scores = false;

  FlagSet train_flags;
  CLI::App* train = app.add_subcommand("train", "Train a joint model or the pipeline baseline");
  train->add_option("--config", config_path, "key=value file; command-line flags take precedence");
  train_flags.add(train, "train_dir", "Training corpus directory");
  train_flags.add(train, "test_dir", "Optional test corpus, evaluated after training");
  train_flags.add(train, "embeddings", "Word vectors (text) or JEMB1 file");
  train_flags.add(train, "out", "Output directory");
  train_flags.add(train, "jobs", "Parallel document parsing/prediction");
  train_flags.add(train, "seeds", "Comma-separated seeds; one run per seed");
  for (const auto& key : jmie::train_config_keys()) {
    if (key == "unsafe_hparams" || key == "freeze_embeddings") {
      train_flags.add_flag(train, key, key == "unsafe_hparams"
                                           ? "Allow values outside the hyperparameter grids"
                                           : "Keep word vectors fixed");
    } else {
      train_flags.add(train, key, "Config key " + key);
    }
  }

  FlagSet predict_flags;
  CLI::App* predict = app.add_subcommand("predict", "Write predicted annotations for a corpus");
  predict->add_option("--config", config_path, "key=value file");
  predict_flags.add(predict, "model", "Directory written by train");
  predict_flags.add(predict, "test_dir", "Corpus to annotate");
  predict_flags.add(predict, "embeddings", "JEMB1 file for precomputed encoders");
  predict_flags.add(predict, "out", "Output directory");
  predict_flags.add(predict, "jobs", "Parallel prediction");
  predict->add_option("--inject-gold", inject_gold, "Use reference inputs: concept, assertion");
  predict->add_flag("--debug-scores", debug_scores, "Also write debug_scores.jsonl (joint only)");

  FlagSet evaluate_flags;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against gold annotations");
  evaluate->add_option("--config", config_path, "key=value file");
  evaluate_flags.add(evaluate, "gold", "Gold corpus directory");
  evaluate_flags.add(evaluate, "pred", "Predicted corpus directory");
  evaluate_flags.add(evaluate, "protocol", "joint or independent");
  evaluate_flags.add(evaluate, "out", "Optional directory for report.json/report.txt");
  evaluate_flags.add(evaluate, "jobs", "Parallel parsing");
  evaluate->add_option("--compare", compare, "Two report.json files: prints F1 deltas a - b")
      ->expected(2);

  FlagSet synth_flags;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth->add_option("--config", config_path, "key=value file");
  synth_flags.add(synth, "sentences", "Number of sentences");
  synth_flags.add(synth, "sentences_per_doc", "Sentences per document");
  synth_flags.add(synth, "seed", "Generator seed (default 7)");
  synth_flags.add(synth, "noise", "Fraction of concepts to retype");
  synth_flags.add(synth, "out", "Output directory");

  FlagSet inspect_flags;
  CLI::App* inspect = app.add_subcommand("inspect", "Print corpus statistics");
  inspect->add_option("--config", config_path, "key=value file");
  inspect_flags.add(inspect, "train_dir", "Training corpus");
  inspect_flags.add(inspect, "test_dir", "Test corpus");
  inspect_flags.add(inspect, "jobs", "Parallel parsing");
  inspect->add_option("dirs", inspect_dirs, "Further corpus directories");

  FlagSet convert_flags;
  CLI::App* convert = app.add_subcommand("convert", "Parse and rewrite an annotated corpus");
  convert->add_option("--config", config_path, "key=value file");
  convert_flags.add(convert, "in", "Input corpus directory");
  convert_flags.add(convert, "out", "Output directory");
  convert_flags.add(convert, "jobs", "Parallel parsing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) {
      train_flags.apply_config(config_path);
      return run_train(train_flags);
    }
    if (*predict) {
      predict_flags.apply_config(config_path);
      return run_predict(predict_flags, inject_gold, debug_scores);
    }
    if (*evaluate) {
      evaluate_flags.apply_config(config_path);
      return run_evaluate(evaluate_flags, compare);
    }
    if (*synth) {
      synth_flags.apply_config(config_path);
      return run_synth(synth_flags);
    }
    if (*inspect) {
      inspect_flags.apply_config(config_path);
      return run_inspect(inspect_flags, inspect_dirs);
    }
    if (*convert) {
      convert_flags.apply_config(config_path);
      return run_convert(convert_flags);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const jmie::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == jmie::ErrorCode::kInvalidConfig ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
