// Copyright 2026 The newsclf Authors.
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
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "newsclf/newsclf.hpp"
#include "support/synthetic_corpus.hpp"

namespace newsclf {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("newsclf_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  RunResult run(const std::vector<std::string>& args, const std::string& env = "env -u NEWSCLF_SEED") const {
    std::string cmd = env + " " + quote(NEWSCLF_CLI_PATH);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " >" + quote(path("stdout.txt")) + " 2>" + quote(path("stderr.txt"));
    RunResult r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(path("stdout.txt"));
    r.err = slurp(path("stderr.txt"));
    return r;
  }

  // Small synthetic corpus with class-shared markers, written as raw JSONL.
  std::string write_corpus_file(const std::string& name = "corpus.jsonl") const {
    testing::SyntheticConfig cfg;
    cfg.markers = testing::MarkerMode::class_shared;
    cfg.publishers = {{"agentur", false, 120}, {"zeitung", false, 100}, {"postille", true, 60},
                      {"tagespresse", true, 40}};
    cfg.marker_vocab = 8;
    cfg.filler_words = 110;
    const auto p = path(name);
    write_corpus(p, testing::make_synthetic_corpus(cfg));
    return p;
  }

  fs::path dir_;
};

std::string long_body(std::size_t n) {
  std::string s;
  while (s.size() < n) s += "wort ";
  return s.substr(0, n);
}

std::string raw_record(const std::string& id, const std::string& body, const std::string& date = "2018-03-01") {
  nlohmann::json j = {{"id", id},        {"url", "https://x.example/" + id},
                      {"title", "Titel"}, {"body", body},
                      {"category", "p"},  {"date", date},
                      {"publisher", "x"}, {"satire", false},
                      {"paid", nullptr}};
  return j.dump() + "\n";
}

std::vector<std::string> out_lines(const std::string& stdout_text) {
  std::vector<std::string> outs;
  std::istringstream is(stdout_text);
  for (std::string line; std::getline(is, line);)
    if (line.rfind("OUT ", 0) == 0) outs.push_back(line.substr(4));
  return outs;
}

TEST_F(Cli, IngestDropsShortBodiesAndIsIdempotent) {
  std::string raw;
  raw += raw_record("a", long_body(600));
  raw += raw_record("b", long_body(400));
  raw += raw_record("c", long_body(800), "01.02.2018");
  raw += raw_record("d", long_body(12));
  raw += raw_record("e", long_body(10000));
  spit(path("raw.jsonl"), raw);
  auto r = run({"ingest", "--input", path("raw.jsonl"), "--output", path("clean.jsonl")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("dropped_short: 2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("kept: 3"), std::string::npos);
  EXPECT_EQ(out_lines(r.out), std::vector<std::string>{path("clean.jsonl")});
  const auto once = slurp(path("clean.jsonl"));
  EXPECT_NE(once.find("\"2018-02-01\""), std::string::npos);
  r = run({"ingest", "--input", path("clean.jsonl"), "--output", path("twice.jsonl")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(path("twice.jsonl")), once);
}

TEST_F(Cli, IngestReportsBadRecordsWithLineNumbers) {
  spit(path("raw.jsonl"), raw_record("a", long_body(600)) + "\n" + raw_record("b", long_body(600), "sometime in May"));
  auto r = run({"ingest", "--input", path("raw.jsonl"), "--output", path("clean.jsonl")});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("sometime in May"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("clean.jsonl")));

  spit(path("broken.jsonl"), raw_record("a", long_body(600)) + "{\"id\": \n");
  r = run({"ingest", "--input", path("broken.jsonl"), "--output", path("clean.jsonl")});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"frobnicate"}).status, 2);
  EXPECT_EQ(run({"train", "--corpus", "x.jsonl"}).status, 2);  // missing --output
  EXPECT_EQ(run({"train", "--corpus", path("missing.jsonl"), "--output", path("m"), "--model", "rbf"}).status, 2);
  EXPECT_EQ(run({"eval", "--corpus", path("missing.jsonl"), "--output", path("r.json")}).status, 2);
  EXPECT_EQ(run({"split", "--corpus", path("missing.jsonl"), "--output", path("s.json"), "--test-fraction", "1.5"})
                .status,
            2);
  EXPECT_EQ(run({"train", "--corpus", path("missing.jsonl"), "--output", path("m")}).status, 1);
  EXPECT_EQ(run({"--help"}).status, 0);
}

TEST_F(Cli, TrainThenEvalAgree) {
  const auto corpus = write_corpus_file();
  auto r = run({"split", "--corpus", corpus, "--output", path("split.json"), "--split-kind", "stratified_random"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("test: 64"), std::string::npos) << r.out;
  r = run({"train", "--corpus", corpus, "--split", path("split.json"), "--output", path("m.bundle"), "--report",
           path("train_report.json"), "--min-df", "5", "--vocab-out", path("vocab.tsv")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(out_lines(r.out),
            (std::vector<std::string>{path("vocab.tsv"), path("train_report.json"), path("m.bundle")}));
  r = run({"eval", "--corpus", corpus, "--bundle", path("m.bundle"), "--split", path("split.json"), "--output",
           path("eval_report.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto a = nlohmann::json::parse(slurp(path("train_report.json")));
  const auto b = nlohmann::json::parse(slurp(path("eval_report.json")));
  EXPECT_EQ(a["metrics"], b["metrics"]);
  EXPECT_EQ(a["confusion_matrix"], b["confusion_matrix"]);
  EXPECT_EQ(a, b);
  EXPECT_GE(b["metrics"]["f1"].get<double>(), 0.95);
  EXPECT_TRUE(b["duration_seconds"].is_null());
}

TEST_F(Cli, PredictWithoutKnownTermsReturnsBias) {
  const auto corpus = write_corpus_file();
  auto r = run({"train", "--corpus", corpus, "--output", path("m.bundle"), "--min-df", "5"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto bundle = load_bundle(path("m.bundle"));
  spit(path("in.jsonl"), "{\"title\": \"\", \"body\": \"qqqqzz xxyyxx\"}\n{\"id\": \"k\", \"title\": \"a\", \"body\": \"\"}\n");
  r = run({"predict", "--bundle", path("m.bundle"), "--input", path("in.jsonl"), "--output", path("p.jsonl")});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(slurp(path("p.jsonl")));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["score"].get<double>(), bundle.model.bias[0]);
    EXPECT_EQ(j["label"], bundle.model.bias[0] > 0 ? "satire" : "regular");
    ++n;
  }
  EXPECT_EQ(n, 2);
}

TEST_F(Cli, ValidationCurveHasOneRowPerC) {
  const auto corpus = write_corpus_file();
  auto r = run({"curve", "--corpus", corpus, "--output", path("vc.csv"), "--kind", "validation", "--folds", "3",
                "--min-df", "5"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream csv(slurp(path("vc.csv")));
  std::vector<std::string> rows;
  for (std::string line; std::getline(csv, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], "x,train_score_mean,cv_score_mean,cv_score_std");
  EXPECT_EQ(rows[1].rfind("0.01,", 0), 0u);
  EXPECT_EQ(rows[7].rfind("10000,", 0), 0u);
}

TEST_F(Cli, ConfigFileAndSeedPrecedence) {
  const auto corpus = write_corpus_file();
  spit(path("run.cfg"), "# split settings\ntest-fraction = 0.5\nseed=9\n");
  auto r = run({"--config", path("run.cfg"), "split", "--corpus", corpus, "--output", path("a.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  auto a = nlohmann::json::parse(slurp(path("a.json")));
  EXPECT_EQ(a["test_ids"].size(), 160u);
  EXPECT_EQ(a["spec"]["seed"], 9);
  r = run({"--config", path("run.cfg"), "split", "--corpus", corpus, "--output", path("b.json"), "--test-fraction",
           "0.25"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("b.json")))["test_ids"].size(), 80u);

  r = run({"split", "--corpus", corpus, "--output", path("env.json")}, "NEWSCLF_SEED=5");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("env.json")))["spec"]["seed"], 5);
  r = run({"--seed", "6", "split", "--corpus", corpus, "--output", path("flag.json")}, "NEWSCLF_SEED=5");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("flag.json")))["spec"]["seed"], 6);
  r = run({"split", "--corpus", corpus, "--output", path("d.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("d.json")))["spec"]["seed"], 42);

  spit(path("bad.cfg"), "no-such-flag=1\n");
  EXPECT_EQ(run({"--config", path("bad.cfg"), "split", "--corpus", corpus, "--output", path("c.json")}).status, 2);
}

TEST_F(Cli, ProtocolEvalAndGridsearch) {
  const auto corpus = write_corpus_file();
  auto r = run({"eval", "--corpus", corpus, "--protocol", "publisher_holdout", "--holdout", "zeitung,tagespresse",
                "--min-df", "5", "--output", path("h.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = nlohmann::json::parse(slurp(path("h.json")));
  EXPECT_EQ(j["protocol"], "publisher_holdout");
  EXPECT_EQ(j["n_test"], 140);
  r = run({"eval", "--corpus", corpus, "--protocol", "publisher_holdout", "--output", path("h2.json")});
  EXPECT_EQ(r.status, 2);
  r = run({"gridsearch", "--corpus", corpus, "--c-grid", "0.01,100", "--folds", "3", "--min-df", "5", "--output",
           path("g.json")});
  ASSERT_EQ(r.status, 0) << r.err;
  j = nlohmann::json::parse(slurp(path("g.json")));
  EXPECT_EQ(j["points"].size(), 2u);
  EXPECT_EQ(j["best_c"], 100);
}

}  // namespace
}  // namespace newsclf
