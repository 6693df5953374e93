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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "jmie_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliRun jmie(const std::string& args) {
  const fs::path log = scratch() / "stdout.txt";
  const std::string cmd = std::string(JMIE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tree_contents(const fs::path& dir) {
  std::string all;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) all += fs::relative(f, dir).string() + "\n" + read_file(f);
  return all;
}

const fs::path& corpus_dir() {
  static const fs::path dir = [] {
    const fs::path d = scratch() / "synth";
    const CliRun r = jmie("synth --sentences 40 --sentences-per-doc 4 --seed 5 --out " + d.string());
    EXPECT_EQ(r.code, 0) << r.out;
    return d;
  }();
  return dir;
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(jmie("").code, 1);
  EXPECT_EQ(jmie("frobnicate").code, 1);
  EXPECT_EQ(jmie("evaluate --bogus-flag x").code, 1);
  const CliRun r = jmie("train --train-dir " + corpus_dir().string() + " --out " +
                     (scratch() / "never").string() + " --lr 0.05");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("unsafe-hparams"), std::string::npos) << r.out;
}

TEST(Cli, RuntimeErrorsExitTwo) {
  const fs::path missing = scratch() / "does_not_exist";
  EXPECT_EQ(jmie("evaluate --gold " + missing.string() + " --pred " + missing.string()).code, 2);
}

TEST(Cli, SynthIsDeterministic) {
  const fs::path again = scratch() / "synth_again";
  ASSERT_EQ(jmie("synth --sentences 40 --sentences-per-doc 4 --seed 5 --out " + again.string()).code, 0);
  EXPECT_EQ(tree_contents(corpus_dir()), tree_contents(again));
  EXPECT_TRUE(fs::exists(again / "txt"));
  EXPECT_TRUE(fs::exists(again / "rel"));
}

TEST(Cli, EvaluateGoldAgainstItselfIsPerfect) {
  const fs::path out = scratch() / "self_eval";
  const CliRun r = jmie("evaluate --gold " + corpus_dir().string() + " --pred " +
                     corpus_dir().string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("Concept 100.0 / Assertion 100.0 / Relation 100.0"), std::string::npos)
      << r.out;
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_TRUE(fs::exists(out / "report.txt"));
}

TEST(Cli, InspectAndConvert) {
  const CliRun r = jmie("inspect --train-dir " + corpus_dir().string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* col : {"#Doc", "#Concept", "#Assertion", "#Relation", "#Sentence", "#Token"}) {
    EXPECT_NE(r.out.find(col), std::string::npos) << col;
  }
  const fs::path out = scratch() / "converted";
  ASSERT_EQ(jmie("convert --in " + corpus_dir().string() + " --out " + out.string()).code, 0);
  EXPECT_EQ(tree_contents(corpus_dir()), tree_contents(out));
}

TEST(Cli, TrainPredictEvaluateCompare) {
  const fs::path model = scratch() / "model";
  const fs::path config = scratch() / "tiny.cfg";
  std::ofstream(config) << "# small run\nhidden=6\nword_dim=6\nconcept_dim=4\n"
                           "assertion_dim=4\nscorer_dim=6\nbatch=8\nmax_epochs=2\n"
                           "dev_fraction=0.2\nlr=0.01\n";
  CliRun r = jmie("train --config " + config.string() + " --unsafe-hparams --train-dir " +
               corpus_dir().string() + " --out " + model.string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"config.txt", "vocab.txt", "model.jckp", "run_record.jsonl",
                        "dev_report.json", "timing.txt"}) {
    EXPECT_TRUE(fs::exists(model / f)) << f;
  }
  EXPECT_NE(read_file(model / "config.txt").find("hidden=6"), std::string::npos);

  const fs::path pred = scratch() / "pred";
  r = jmie("predict --model " + model.string() + " --test-dir " + corpus_dir().string() +
           " --out " + pred.string() + " --debug-scores");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(pred / "debug_scores.jsonl"));
  const fs::path gold_pred = scratch() / "pred_gold";
  r = jmie("predict --model " + model.string() + " --test-dir " + corpus_dir().string() +
           " --out " + gold_pred.string() + " --inject-gold concept assertion");
  ASSERT_EQ(r.code, 0) << r.out;

  const fs::path ea = scratch() / "eval_a";
  const fs::path eb = scratch() / "eval_b";
  ASSERT_EQ(jmie("evaluate --gold " + corpus_dir().string() + " --pred " + pred.string() +
                 " --out " + ea.string()).code, 0);
  r = jmie("evaluate --gold " + corpus_dir().string() + " --pred " + gold_pred.string() +
           " --protocol independent --out " + eb.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("Concept 100.0"), std::string::npos) << r.out;

  r = jmie("evaluate --compare " + (eb / "report.json").string() + " " +
           (eb / "report.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("relation +0.0"), std::string::npos) << r.out;
}

}  // namespace
