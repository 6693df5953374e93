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

#include "jmie/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>

#include "jmie/checkpoint.hpp"
#include "jmie/error.hpp"
#include "jmie/fit.hpp"
#include "jmie/log.hpp"

namespace jmie {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kInvalidConfig,
              "bad value '" + std::string(value) + "' for " + std::string(key));
}

double parse_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) bad_value(key, s);
  return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, s);
  return v;
}

bool parse_bool(std::string_view key, std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad_value(key, s);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool on_grid(double v, std::initializer_list<double> grid) {
  return std::any_of(grid.begin(), grid.end(),
                     [&](double g) { return std::abs(v - g) <= 1e-12 * g; });
}

template <typename T>
bool in(T v, std::initializer_list<T> grid) {
  return std::find(grid.begin(), grid.end(), v) != grid.end();
}

struct Field {
  std::string key;
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, std::string_view)> set;
};

#define JMIE_SIZE_FIELD(name)                                                         \
  Field {                                                                             \
    #name, [](const TrainConfig& c) { return std::to_string(c.name); },               \
        [](TrainConfig& c, std::string_view v) { c.name = parse_uint(#name, v); }     \
  }
#define JMIE_DOUBLE_FIELD(name)                                                       \
  Field {                                                                             \
    #name, [](const TrainConfig& c) { return format_double(c.name); },                \
        [](TrainConfig& c, std::string_view v) { c.name = parse_double(#name, v); }   \
  }
#define JMIE_BOOL_FIELD(name)                                                         \
  Field {                                                                             \
    #name, [](const TrainConfig& c) { return std::string(c.name ? "true" : "false"); }, \
        [](TrainConfig& c, std::string_view v) { c.name = parse_bool(#name, v); }     \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"arch", [](const TrainConfig& c) { return std::string(to_string(c.arch)); },
            [](TrainConfig& c, std::string_view v) {
              const auto a = parse_arch(v);
              if (!a) bad_value("arch", v);
              c.arch = *a;
            }},
      Field{"encoder", [](const TrainConfig& c) { return std::string(to_string(c.encoder)); },
            [](TrainConfig& c, std::string_view v) {
              const auto m = parse_encoder_mode(v);
              if (!m) bad_value("encoder", v);
              c.encoder = *m;
            }},
      Field{"relation_mode",
            [](const TrainConfig& c) { return std::string(to_string(c.relation_mode)); },
            [](TrainConfig& c, std::string_view v) {
              const auto m = parse_relation_mode(v);
              if (!m) bad_value("relation_mode", v);
              c.relation_mode = *m;
            }},
      JMIE_DOUBLE_FIELD(lr),
      JMIE_SIZE_FIELD(batch),
      JMIE_SIZE_FIELD(hidden),
      JMIE_SIZE_FIELD(concept_dim),
      JMIE_SIZE_FIELD(assertion_dim),
      JMIE_SIZE_FIELD(word_dim),
      JMIE_SIZE_FIELD(precomputed_dim),
      JMIE_SIZE_FIELD(scorer_dim),
      JMIE_SIZE_FIELD(ffn_hidden),
      JMIE_DOUBLE_FIELD(dropout),
      JMIE_DOUBLE_FIELD(weight_decay),
      JMIE_SIZE_FIELD(max_epochs),
      JMIE_SIZE_FIELD(patience),
      JMIE_SIZE_FIELD(seed),
      JMIE_DOUBLE_FIELD(dev_fraction),
      JMIE_BOOL_FIELD(teacher_forcing),
      JMIE_BOOL_FIELD(constrain_bio),
      JMIE_BOOL_FIELD(freeze_embeddings),
      JMIE_BOOL_FIELD(unsafe_hparams),
  };
  return table;
}

#undef JMIE_SIZE_FIELD
#undef JMIE_DOUBLE_FIELD
#undef JMIE_BOOL_FIELD

FitConfig fit_config(const TrainConfig& c) {
  FitConfig f;
  f.optimizer.lr = c.lr;
  f.optimizer.weight_decay = c.weight_decay;
  f.batch = c.batch;
  f.max_epochs = c.max_epochs;
  f.patience = c.patience;
  f.seed = c.seed;
  return f;
}

std::vector<std::size_t> lengths_of(const std::vector<SentenceExample>& examples) {
  std::vector<std::size_t> out;
  for (const auto& e : examples) out.push_back(e.input.length);
  return out;
}

std::vector<const SentenceExample*> pick(const std::vector<SentenceExample>& examples,
                                         std::span<const std::size_t> batch) {
  std::vector<const SentenceExample*> out;
  for (std::size_t i : batch) out.push_back(&examples[i]);
  return out;
}

using PredictFn = std::function<SentencePrediction(const SentenceExample&)>;

Corpus predict_examples(const Corpus& source, const std::vector<SentenceExample>& examples,
                        const PredictFn& predict_one) {
  std::vector<SentencePrediction> preds;
  preds.reserve(examples.size());
  for (const auto& ex : examples) preds.push_back(predict_one(ex));
  return assemble_predictions(source, preds);
}

nlohmann::json epoch_record(std::string_view arch, std::string_view stage, const EpochLog& e,
                            const std::vector<std::string>& names, const nlohmann::json& dev) {
  nlohmann::json losses;
  for (std::size_t i = 0; i < names.size() && i < e.losses.size(); ++i) losses[names[i]] = e.losses[i];
  return {{"arch", arch},          {"stage", stage},         {"epoch", e.epoch},
          {"loss", losses},        {"dev", dev},             {"dev_metric", e.dev_metric},
          {"improved", e.improved}};
}

void train_joint(TrainResult& result, const TrainDevSplit& split, const TrainInputs& inputs) {
  const TrainConfig& cfg = result.model.config;
  result.model.joint = std::make_unique<JointModel>(cfg.model_config(), result.model.vocab);
  JointModel& model = *result.model.joint;
  model.init(cfg.seed, inputs.pretrained);
  const auto train_ex = make_examples(split.train, model.encoder(), inputs.precomputed);
  const auto dev_ex = make_examples(split.dev, model.encoder(), inputs.precomputed);

  nlohmann::json last_dev;
  const std::vector<std::string> names = {"concept", "assertion", "relation", "total"};
  const FitResult fr = fit(
      model.params(), lengths_of(train_ex), fit_config(cfg),
      [&](ad::Tape& tape, std::span<const std::size_t> batch, const EncodeOptions& options) {
        const StageLosses l = model.forward(tape, pick(train_ex, batch), cfg.teacher_forcing, options);
        const double sum = l.concept_loss.item() + l.assertion_loss.item() + l.relation_loss.item();
        result.additivity_residual =
            std::max(result.additivity_residual, std::abs(l.total.item() - sum));
        return BatchLoss{{l.concept_loss, l.assertion_loss, l.relation_loss, l.total}};
      },
      [&](std::size_t) {
        const Corpus pred = predict_examples(split.dev, dev_ex, [&](const SentenceExample& ex) {
          return model.predict(ex);
        });
        const EvalReport r = evaluate(split.dev, pred, Protocol::kJoint);
        last_dev = r.to_json();
        return r.mean_f1();
      },
      [&] { model.mask_gradients(); },
      [&](const EpochLog& e) { result.records.push_back(epoch_record("joint", "joint", e, names, last_dev)); });
  result.best_epoch = fr.best_epoch;
  result.epochs_run = fr.epochs.size();
}

void train_pipeline(TrainResult& result, const TrainDevSplit& split, const TrainInputs& inputs) {
  const TrainConfig& cfg = result.model.config;
  result.model.pipeline = std::make_unique<PipelineModels>(cfg.pipeline_config(), result.model.vocab);
  PipelineModels& models = *result.model.pipeline;
  models.init(cfg.seed, inputs.pretrained);
  const Encoder& encoder = models.concept_model->encoder();
  const auto train_ex = make_examples(split.train, encoder, inputs.precomputed);
  const auto dev_ex = make_examples(split.dev, encoder, inputs.precomputed);
  const auto lengths = lengths_of(train_ex);

  auto run_stage = [&](std::string_view stage, ad::ParameterSet& params,
                       const std::function<ad::Tensor(ad::Tape&, std::span<const SentenceExample* const>,
                                                      const EncodeOptions&)>& loss,
                       const std::function<void()>& mask, const GoldInjection& inject,
                       StageScore EvalReport::*metric) {
    nlohmann::json last_dev;
    const FitResult fr = fit(
        params, lengths, fit_config(cfg),
        [&](ad::Tape& tape, std::span<const std::size_t> batch, const EncodeOptions& options) {
          const auto b = pick(train_ex, batch);
          return BatchLoss{{loss(tape, b, options)}};
        },
        [&](std::size_t) {
          const Corpus pred = predict_examples(split.dev, dev_ex, [&](const SentenceExample& ex) {
            return predict_pipeline(models, ex, inject);
          });
          const EvalReport r = evaluate(split.dev, pred, Protocol::kIndependent);
          last_dev = r.to_json();
          return (r.*metric).f1;
        },
        mask,
        [&](const EpochLog& e) {
          result.records.push_back(epoch_record("pipeline", stage, e, {"loss"}, last_dev));
        });
    result.best_epoch = fr.best_epoch;
    result.epochs_run += fr.epochs.size();
  };

  run_stage(
      "concept", models.concept_model->params(),
      [&](ad::Tape& t, std::span<const SentenceExample* const> b, const EncodeOptions& o) {
        return models.concept_model->loss(t, b, o);
      },
      [&] { models.concept_model->mask_gradients(); }, GoldInjection{false, false},
      &EvalReport::concept_score);
  run_stage(
      "assertion", models.assertion_model->params(),
      [&](ad::Tape& t, std::span<const SentenceExample* const> b, const EncodeOptions& o) {
        return models.assertion_model->loss(t, b, o);
      },
      [&] { models.assertion_model->mask_gradients(); }, GoldInjection{true, false},
      &EvalReport::assertion_score);
  run_stage(
      "relation", models.relation_model->params(),
      [&](ad::Tape& t, std::span<const SentenceExample* const> b, const EncodeOptions& o) {
        return models.relation_model->loss(t, b, o);
      },
      [&] { models.relation_model->mask_gradients(); }, GoldInjection{true, true},
      &EvalReport::relation_score);
}

}  // namespace

std::string_view to_string(Arch arch) { return arch == Arch::kJoint ? "joint" : "pipeline"; }

std::optional<Arch> parse_arch(std::string_view s) {
  if (s == "joint") return Arch::kJoint;
  if (s == "pipeline") return Arch::kPipeline;
  return std::nullopt;
}

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void TrainConfig::set(std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(*this, trim(value));
      return;
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + std::string(key) + "'");
}

std::string TrainConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += f.key + "=" + f.get(*this) + "\n";
  return out;
}

TrainConfig TrainConfig::parse(std::string_view text) {
  TrainConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": expected key=value");
    }
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j;
  for (const auto& f : fields()) j[f.key] = f.get(*this);
  return j;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (batch == 0) fail("batch must be positive");
  if (max_epochs == 0) fail("max_epochs must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) fail("dev_fraction must lie in (0, 1)");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (weight_decay < 0.0) fail("weight_decay must be non-negative");
  if (hidden == 0 || concept_dim == 0 || assertion_dim == 0 || scorer_dim == 0 ||
      ffn_hidden == 0 || word_dim == 0) {
    fail("dimensions must be positive");
  }
  if (unsafe_hparams) return;
  const std::string hint = " (pass --unsafe-hparams to override)";
  if (contextual()) {
    if (!on_grid(lr, {1e-5, 2e-5, 5e-5})) fail("lr " + format_double(lr) + " is not in {1e-5, 2e-5, 5e-5}" + hint);
    if (!in<std::size_t>(batch, {16, 32})) fail("batch " + std::to_string(batch) + " is not in {16, 32}" + hint);
  } else {
    if (!on_grid(lr, {1e-2, 1e-3, 1e-4})) fail("lr " + format_double(lr) + " is not in {1e-2, 1e-3, 1e-4}" + hint);
    if (!in<std::size_t>(batch, {32, 64, 128})) {
      fail("batch " + std::to_string(batch) + " is not in {32, 64, 128}" + hint);
    }
  }
  if (!in<std::size_t>(hidden, {100, 300, 600})) fail("hidden " + std::to_string(hidden) + " is not in {100, 300, 600}" + hint);
  if (!in<std::size_t>(concept_dim, {32, 64})) fail("concept_dim " + std::to_string(concept_dim) + " is not in {32, 64}" + hint);
  if (!in<std::size_t>(assertion_dim, {32, 64})) {
    fail("assertion_dim " + std::to_string(assertion_dim) + " is not in {32, 64}" + hint);
  }
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.encoder.mode = encoder;
  m.encoder.word_dim = word_dim;
  m.encoder.hidden = hidden;
  m.encoder.precomputed_dim = precomputed_dim;
  m.encoder.dropout = dropout;
  m.encoder.freeze_embeddings = freeze_embeddings;
  m.concept_dim = concept_dim;
  m.assertion_dim = assertion_dim;
  m.scorer_dim = scorer_dim;
  m.relation_mode = relation_mode;
  m.constrain_bio = constrain_bio;
  return m;
}

PipelineConfig TrainConfig::pipeline_config() const {
  PipelineConfig p;
  p.encoder = model_config().encoder;
  p.type_dim = concept_dim;
  p.assertion_dim = assertion_dim;
  p.ffn_hidden = ffn_hidden;
  p.constrain_bio = constrain_bio;
  return p;
}

Vocabulary build_vocabulary(const Corpus& train, const TrainInputs& inputs) {
  Vocabulary vocab;
  for (const auto& doc : train) {
    for (const auto& sent : doc.sentences) {
      for (const auto& tok : sent) vocab.add(tok.text);
    }
  }
  if (inputs.pretrained != nullptr) {
    for (const Corpus* extra : inputs.vocabulary_corpora) {
      for (const auto& doc : *extra) {
        for (const auto& sent : doc.sentences) {
          for (const auto& tok : sent) {
            if (inputs.pretrained->vocab.contains(tok.text)) vocab.add(tok.text);
          }
        }
      }
    }
  }
  return vocab;
}

const Encoder& TrainedModel::encoder() const {
  return joint ? joint->encoder() : pipeline->concept_model->encoder();
}

SentencePrediction TrainedModel::predict(const SentenceExample& example,
                                         const GoldInjection& inject) const {
  return joint ? joint->predict(example, inject) : predict_pipeline(*pipeline, example, inject);
}

void TrainedModel::round_to_float32() {
  if (joint) {
    joint->params().round_to_float32();
  } else {
    pipeline->concept_model->params().round_to_float32();
    pipeline->assertion_model->params().round_to_float32();
    pipeline->relation_model->params().round_to_float32();
  }
}

void TrainedModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "config.txt", std::ios::binary);
    out << config.to_text();
  }
  {
    std::ofstream out(dir / "vocab.txt", std::ios::binary);
    out << vocab.serialize();
  }
  if (joint) {
    ad::save_checkpoint(joint->params(), dir / "model.jckp");
  } else {
    ad::save_checkpoint(pipeline->concept_model->params(), dir / "concept.jckp");
    ad::save_checkpoint(pipeline->assertion_model->params(), dir / "assertion.jckp");
    ad::save_checkpoint(pipeline->relation_model->params(), dir / "relation.jckp");
  }
}

TrainedModel TrainedModel::load(const std::filesystem::path& dir) {
  TrainedModel m;
  m.config = TrainConfig::load(dir / "config.txt");
  std::ifstream in(dir / "vocab.txt", std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + (dir / "vocab.txt").string());
  std::ostringstream ss;
  ss << in.rdbuf();
  m.vocab = Vocabulary::parse(ss.str());
  if (m.config.arch == Arch::kJoint) {
    m.joint = std::make_unique<JointModel>(m.config.model_config(), m.vocab);
    ad::load_checkpoint(dir / "model.jckp", m.joint->params());
  } else {
    m.pipeline = std::make_unique<PipelineModels>(m.config.pipeline_config(), m.vocab);
    ad::load_checkpoint(dir / "concept.jckp", m.pipeline->concept_model->params());
    ad::load_checkpoint(dir / "assertion.jckp", m.pipeline->assertion_model->params());
    ad::load_checkpoint(dir / "relation.jckp", m.pipeline->relation_model->params());
  }
  return m;
}

Corpus assemble_predictions(const Corpus& source, const std::vector<SentencePrediction>& preds) {
  Corpus out;
  std::map<std::string, std::size_t> index;
  for (const auto& doc : source) {
    index[doc.doc_id] = out.size();
    AnnotatedDocument d;
    d.doc_id = doc.doc_id;
    d.sentences = doc.sentences;
    out.push_back(std::move(d));
  }
  for (const auto& p : preds) {
    const auto it = index.find(p.doc_id);
    if (it == index.end()) throw Error(ErrorCode::kCorpusMismatch, "prediction for unknown document " + p.doc_id);
    AnnotatedDocument& d = out[it->second];
    d.concepts.insert(d.concepts.end(), p.concepts.begin(), p.concepts.end());
    d.assertions.insert(d.assertions.end(), p.assertions.begin(), p.assertions.end());
    d.relations.insert(d.relations.end(), p.relations.begin(), p.relations.end());
  }
  for (auto& d : out) {
    std::sort(d.concepts.begin(), d.concepts.end());
    std::sort(d.assertions.begin(), d.assertions.end());
    std::sort(d.relations.begin(), d.relations.end());
    d.relations.erase(std::unique(d.relations.begin(), d.relations.end()), d.relations.end());
  }
  return out;
}

Corpus predict_corpus(const TrainedModel& model, const Corpus& corpus,
                      const PrecomputedEmbeddings* precomputed, const GoldInjection& inject,
                      int jobs) {
  const auto examples = make_examples(corpus, model.encoder(), precomputed);
  std::vector<SentencePrediction> preds(examples.size());
  const std::size_t workers = std::max<std::size_t>(1, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < examples.size(); ++i) preds[i] = model.predict(examples[i], inject);
  } else {
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < examples.size(); i += workers) {
          preds[i] = model.predict(examples[i], inject);
        }
      }));
    }
    for (auto& t : tasks) t.get();
  }
  return assemble_predictions(corpus, preds);
}

void write_run_records(const std::vector<nlohmann::json>& records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& r : records) out << r.dump() << "\n";
}

TrainResult train(const Corpus& corpus, const TrainConfig& config, const TrainInputs& inputs) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  TrainResult result;
  TrainConfig& cfg = result.model.config;
  cfg = config;
  if (inputs.pretrained != nullptr) cfg.word_dim = inputs.pretrained->dim;
  if (cfg.contextual()) {
    if (inputs.precomputed == nullptr) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string("encoder ") + std::string(to_string(cfg.encoder)) +
                      " needs a JEMB1 embeddings file");
    }
    cfg.precomputed_dim = inputs.precomputed->dim();
    inputs.precomputed->check_against(corpus);
  }
  const TrainDevSplit split = split_train_dev(corpus, cfg.dev_fraction, cfg.seed);
  result.model.vocab = build_vocabulary(split.train, inputs);
  result.records.push_back({{"config", cfg.to_json()},
                            {"train_documents", split.train.size()},
                            {"dev_documents", split.dev.size()},
                            {"vocabulary", result.model.vocab.size()}});
  if (cfg.arch == Arch::kJoint) {
    train_joint(result, split, inputs);
  } else {
    train_pipeline(result, split, inputs);
  }
  result.model.round_to_float32();
  result.dev_report =
      evaluate(split.dev, predict_corpus(result.model, split.dev, inputs.precomputed), Protocol::kJoint);
  result.records.push_back({{"final", true},
                            {"best_epoch", result.best_epoch},
                            {"epochs_run", result.epochs_run},
                            {"dev", result.dev_report.to_json()}});
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  log(LogLevel::kInfo, "training finished in ", result.wall_seconds, " s");
  return result;
}

SeedsResult run_seeds(const Corpus& corpus, const Corpus* test, const TrainConfig& config,
                      const std::vector<std::uint64_t>& seeds, const TrainInputs& inputs) {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidConfig, "at least one seed is required");
  SeedsResult out;
  out.seeds = seeds;
  for (std::uint64_t seed : seeds) {
    TrainConfig c = config;
    c.seed = seed;
    TrainResult r = train(corpus, c, inputs);
    if (test != nullptr) {
      out.reports.push_back(
          evaluate(*test, predict_corpus(r.model, *test, inputs.precomputed), Protocol::kJoint));
    } else {
      out.reports.push_back(r.dev_report);
    }
  }
  out.mean = mean_report(out.reports);
  return out;
}

}  // namespace jmie
