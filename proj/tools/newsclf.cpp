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

// newsclf: command line front end for corpus cleaning, splitting, training,
// evaluation, curves and prediction.
//
// Exit status: 0 success, 2 usage error, 1 runtime error. Every output file
// is announced on stdout as a final "OUT <path>" line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "newsclf/newsclf.hpp"

namespace {

using namespace newsclf;

// Bad flag values or combinations; reported with exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  unsigned jobs = 1;
  std::uint64_t seed = 42;

  // corpus / cleaning
  std::string input, output, corpus, patterns, stats_out;
  std::size_t min_chars = 500, max_chars = 10000;
  std::vector<std::string> date_formats;

  // task / split
  std::string task = "satire";
  std::string split_kind = "random";
  std::string split_file;
  double test_fraction = 0.2;
  std::vector<std::string> holdout;
  int folds = 10;

  // pipeline
  bool no_lowercase = false;
  int ngram_min = 1, ngram_max = 2;
  double max_df = 0.8;
  std::uint64_t min_df = 20;

  // model
  std::string model = "svm";
  std::optional<double> c;
  double tol = 1e-6;
  int max_iter = 10000;
  bool no_bias = false;

  // outputs / misc
  std::string bundle, report, vocab_out, matrix_out, protocol;
  std::string curve_kind = "validation";
  std::vector<double> c_grid;
  std::vector<std::size_t> sizes;
  bool timing = false;
};

std::vector<std::string> g_outputs;

void announce(const std::string& path) { g_outputs.push_back(path); }

PipelineParams pipeline_params(const RunConfig& rc) {
  PipelineParams p;
  p.tokenizer.lowercase = !rc.no_lowercase;
  p.tokenizer.ngram_min = rc.ngram_min;
  p.tokenizer.ngram_max = rc.ngram_max;
  p.max_df_ratio = rc.max_df;
  p.min_df_count = rc.min_df;
  try {
    p.tokenizer.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (!(p.max_df_ratio > 0.0 && p.max_df_ratio <= 1.0)) throw UsageError("--max-df must lie in (0, 1]");
  return p;
}

ModelSpec model_spec(const RunConfig& rc) {
  ModelSpec m;
  try {
    m.kind = parse_model_kind(rc.model);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  m.solver = SolverConfig::defaults_for(m.kind);
  if (rc.c) m.solver.c = *rc.c;
  m.solver.tol = rc.tol;
  m.solver.max_iter = rc.max_iter;
  m.solver.fit_bias = !rc.no_bias;
  m.solver.seed = rc.seed;
  try {
    m.solver.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return m;
}

Task task_of(const RunConfig& rc) {
  try {
    return parse_task(rc.task);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

Corpus read_corpus(const std::string& path) {
  auto r = load_corpus(path);
  if (!r.errors.empty()) {
    for (const auto& e : r.errors) std::cerr << path << ": line " << e.line << ": " << e.message << '\n';
    throw Error(std::to_string(r.errors.size()) + " invalid record(s) in " + path);
  }
  return std::move(r.articles);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  if (!out) throw IoError(path, "write failed");
  announce(path);
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string metrics_line(const Metrics& m) {
  std::ostringstream os;
  os << "accuracy " << detail::format_double(m.accuracy) << " precision " << detail::format_double(m.precision)
     << " recall " << detail::format_double(m.recall) << " f1 " << detail::format_double(m.f1);
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_ingest(const RunConfig& rc) {
  CleaningConfig cfg;
  cfg.min_body_chars = rc.min_chars;
  cfg.max_body_chars = rc.max_chars;
  if (!rc.date_formats.empty()) cfg.date_formats = rc.date_formats;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (!rc.patterns.empty()) cfg.strip_patterns = load_strip_patterns(rc.patterns);

  auto loaded = load_corpus(rc.input);
  if (!loaded.errors.empty()) {
    for (const auto& e : loaded.errors) std::cerr << rc.input << ": line " << e.line << ": " << e.message << '\n';
    throw Error(std::to_string(loaded.errors.size()) + " invalid record(s) in " + rc.input);
  }
  Corpus kept;
  std::size_t too_short = 0, too_long = 0;
  for (std::size_t i = 0; i < loaded.articles.size(); ++i) {
    CleanResult r;
    try {
      r = clean_article_detailed(loaded.articles[i], cfg);
    } catch (const Error& e) {
      throw RecordError(loaded.lines[i], e.what());
    }
    if (r.reason == DropReason::too_short) ++too_short;
    if (r.reason == DropReason::too_long) ++too_long;
    if (r.article) kept.push_back(std::move(*r.article));
  }
  write_corpus(rc.output, kept);
  announce(rc.output);
  std::cout << "total: " << loaded.articles.size() << '\n'
            << "kept: " << kept.size() << '\n'
            << "dropped_short: " << too_short << '\n'
            << "dropped_long: " << too_long << '\n';
  if (!rc.stats_out.empty()) write_json(rc.stats_out, to_json(corpus_stats(kept)));
  return 0;
}

int cmd_stats(const RunConfig& rc) {
  const auto corpus = read_corpus(rc.corpus);
  const auto j = to_json(corpus_stats(corpus));
  std::cout << j.dump(2) << '\n';
  if (!rc.output.empty()) write_json(rc.output, j);
  return 0;
}

SplitSpec split_spec(const RunConfig& rc) {
  const auto field = label_field(task_of(rc));
  SplitSpec s;
  try {
    switch (parse_split_kind(rc.split_kind)) {
      case SplitKind::random: s = SplitSpec::random(rc.test_fraction, rc.seed, field); break;
      case SplitKind::stratified_random: s = SplitSpec::stratified(rc.test_fraction, rc.seed, field); break;
      case SplitKind::publisher_holdout: s = SplitSpec::holdout(rc.holdout, field); break;
      case SplitKind::kfold: s = SplitSpec::kfold(rc.folds, rc.seed, field); break;
    }
    s.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return s;
}

int cmd_split(const RunConfig& rc) {
  const auto spec = split_spec(rc);
  const auto corpus = task_subset(read_corpus(rc.corpus), task_of(rc));
  nlohmann::json j;
  if (spec.kind == SplitKind::kfold) {
    j["spec"] = to_json(spec);
    auto& arr = j["folds"] = nlohmann::json::array();
    for (const auto& p : make_folds(corpus, spec)) arr.push_back(to_json(p));
  } else {
    const auto p = make_partition(corpus, spec);
    j = to_json(p);
    std::cout << "train: " << p.train_ids.size() << "\ntest: " << p.test_ids.size() << '\n';
  }
  write_json(rc.output, j);
  return 0;
}

Partition read_partition(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open split file");
  try {
    auto j = nlohmann::json::parse(in);
    if (j.contains("folds")) throw FormatError(path + ": k-fold split files cannot drive train/eval");
    return partition_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// Split file if given, otherwise the partition described by the flags.
Partition resolve_partition(const RunConfig& rc, const Corpus& corpus) {
  if (!rc.split_file.empty()) return read_partition(rc.split_file);
  const auto spec = split_spec(rc);
  if (spec.kind == SplitKind::kfold) throw UsageError("train/eval need a single split, not kfold");
  return make_partition(corpus, spec);
}

int cmd_train(const RunConfig& rc) {
  const Task task = task_of(rc);
  const auto params = pipeline_params(rc);
  const auto spec = model_spec(rc);
  if (rc.split_file.empty()) split_spec(rc);  // validate flags before reading the corpus

  const auto corpus = task_subset(read_corpus(rc.corpus), task);
  const auto part = resolve_partition(rc, corpus);
  const auto train = select(corpus, part.train_ids);
  const auto test = select(corpus, part.test_ids);

  ProtocolParams pp;
  pp.pipeline = params;
  pp.model = spec;
  pp.jobs = rc.jobs;
  TrainedPipeline tp = train_pipeline(train, task, params, spec, rc.jobs);
  if (!tp.model.converged) std::cerr << "warning: solver stopped at max_iter before reaching tol\n";
  std::cout << "train: " << train.size() << " documents, vocabulary " << tp.pipeline.vocab.size() << " terms\n";

  if (!rc.vocab_out.empty()) {
    std::ostringstream os;
    write_vocabulary_tsv(os, tp.pipeline.vocab, tp.pipeline.tfidf);
    write_text(rc.vocab_out, os.str());
  }
  if (!rc.matrix_out.empty()) {
    std::ostringstream os;
    write_matrix_market(os, tp.pipeline.transform(train, rc.jobs));
    write_text(rc.matrix_out, os.str());
  }

  if (!test.empty()) {
    EvalReport r;
    const auto truth = labels_of(test, label_field(task));
    const auto predicted = predict(tp.model, tp.pipeline.transform(test, rc.jobs));
    r.metrics = score_predictions(tp.model, task, truth, predicted, &r.confusion);
    std::cout << "holdout: " << metrics_line(r.metrics) << '\n';
    if (!rc.report.empty()) {
      r.protocol = "holdout";
      r.split = part.spec;
      r.model = spec;
      r.pipeline = params;
      r.corpus_fingerprint = corpus_fingerprint(corpus);
      r.n_train = train.size();
      r.n_test = test.size();
      r.converged = tp.model.converged;
      write_json(rc.report, to_json(r, rc.timing));
    }
  }
  save_bundle(make_bundle(std::move(tp), task, corpus_fingerprint(train)), rc.bundle);
  announce(rc.bundle);
  return 0;
}

int cmd_eval(const RunConfig& rc) {
  if (rc.bundle.empty() == rc.protocol.empty()) throw UsageError("eval needs exactly one of --bundle or --protocol");
  const auto start = std::chrono::steady_clock::now();
  EvalReport r;
  if (!rc.bundle.empty()) {
    if (rc.split_file.empty()) split_spec(rc);
    const auto bundle = load_bundle(rc.bundle);
    const Task task = parse_task(bundle.task);
    const auto corpus = task_subset(read_corpus(rc.corpus), task);
    const auto part = resolve_partition(rc, corpus);
    const auto test = select(corpus, part.test_ids);
    if (test.empty()) throw Error("the split has no test documents");
    const auto truth = labels_of(test, label_field(task));
    const auto predicted = predict(bundle.model, bundle.pipeline.transform(test, rc.jobs));
    r.metrics = score_predictions(bundle.model, task, truth, predicted, &r.confusion);
    r.protocol = "holdout";
    r.split = part.spec;
    r.model.kind = bundle.model.kind;
    r.model.solver = bundle.model.config;
    r.pipeline.tokenizer = bundle.pipeline.tokenizer;
    r.pipeline.max_df_ratio = bundle.pipeline.vocab.max_df_ratio();
    r.pipeline.min_df_count = bundle.pipeline.vocab.min_df_count();
    r.corpus_fingerprint = corpus_fingerprint(corpus);
    r.n_train = part.train_ids.size();
    r.n_test = test.size();
    r.converged = bundle.model.converged;
  } else {
    Protocol p;
    try {
      p = parse_protocol(rc.protocol);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    ProtocolParams pp;
    pp.pipeline = pipeline_params(rc);
    pp.model = model_spec(rc);
    pp.test_fraction = rc.test_fraction;
    pp.seed = rc.seed;
    pp.holdout_publishers = rc.holdout;
    pp.jobs = rc.jobs;
    if (p == Protocol::publisher_holdout && rc.holdout.empty())
      throw UsageError("publisher_holdout needs --holdout");
    if (!(rc.test_fraction > 0.0 && rc.test_fraction < 1.0)) throw UsageError("--test-fraction must lie in (0, 1)");
    r = run_protocol(read_corpus(rc.corpus), p, pp);
  }
  r.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << r.protocol << ": " << metrics_line(r.metrics) << '\n';
  write_json(rc.output, to_json(r, rc.timing));
  return 0;
}

std::vector<CurvePoint> run_validation(const RunConfig& rc, const Corpus& corpus) {
  CvOptions opt{rc.folds, rc.seed, rc.jobs};
  const auto& grid = rc.c_grid.empty() ? default_c_grid() : rc.c_grid;
  return validation_curve(corpus, grid, task_of(rc), pipeline_params(rc), model_spec(rc), opt);
}

void check_curve_flags(const RunConfig& rc) {
  pipeline_params(rc);
  model_spec(rc);
  task_of(rc);
  if (rc.folds < 2) throw UsageError("--folds must be >= 2");
  for (double c : rc.c_grid)
    if (!(c > 0.0)) throw UsageError("--c-grid values must be positive");
}

int cmd_curve(const RunConfig& rc) {
  check_curve_flags(rc);
  if (rc.curve_kind != "learning" && rc.curve_kind != "validation")
    throw UsageError("--kind must be learning or validation");
  if (rc.curve_kind == "learning" && rc.sizes.empty()) throw UsageError("learning curves need --sizes");
  const auto corpus = task_subset(read_corpus(rc.corpus), task_of(rc));
  std::vector<CurvePoint> points;
  if (rc.curve_kind == "learning") {
    CvOptions opt{rc.folds, rc.seed, rc.jobs};
    points = learning_curve(corpus, rc.sizes, task_of(rc), pipeline_params(rc), model_spec(rc), opt);
  } else {
    points = run_validation(rc, corpus);
  }
  std::ostringstream os;
  write_curve_csv(os, points);
  write_text(rc.output, os.str());
  return 0;
}

int cmd_gridsearch(const RunConfig& rc) {
  check_curve_flags(rc);
  const auto corpus = task_subset(read_corpus(rc.corpus), task_of(rc));
  const auto points = run_validation(rc, corpus);
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].cv_score > points[best].cv_score) best = i;
  nlohmann::json j;
  j["task"] = rc.task;
  j["model"] = rc.model;
  j["folds"] = rc.folds;
  j["best_c"] = points[best].x;
  j["best_cv_score"] = points[best].cv_score;
  auto& arr = j["points"] = nlohmann::json::array();
  for (const auto& p : points)
    arr.push_back({{"c", p.x}, {"train_score_mean", p.train_score}, {"cv_score_mean", p.cv_score},
                   {"cv_score_std", p.cv_std}});
  std::cout << "best_c " << detail::format_double(points[best].x) << " cv_score "
            << detail::format_double(points[best].cv_score) << '\n';
  write_json(rc.output, j);
  return 0;
}

int cmd_predict(const RunConfig& rc) {
  const auto bundle = load_bundle(rc.bundle);
  auto loaded = load_corpus(rc.input, Schema::text_only);
  if (!loaded.errors.empty()) {
    for (const auto& e : loaded.errors) std::cerr << rc.input << ": line " << e.line << ": " << e.message << '\n';
    throw Error(std::to_string(loaded.errors.size()) + " invalid record(s) in " + rc.input);
  }
  const auto scores = bundle.scores(loaded.articles, rc.jobs);
  std::ostringstream os;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto idx = predict_index(bundle.model, scores[i]);
    nlohmann::json j;
    j["id"] = loaded.articles[i].id;
    j["label"] = bundle.model.classes[idx];
    if (bundle.model.is_binary()) {
      j["score"] = scores[i][0];
    } else {
      j["score"] = scores[i][idx];
      j["scores"] = scores[i];
    }
    os << j.dump() << '\n';
  }
  write_text(rc.output, os.str());
  return 0;
}

// ---------------------------------------------------------------------------
// Config file: key=value lines, keys are long flag names. Values are only
// used for flags the command line did not set.

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ": line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::string config_path;
  const CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    else if (!sub && args[i].rfind("-", 0) != 0) {
      try {
        sub = app.get_subcommand(args[i]);
      } catch (const CLI::OptionNotFound&) {
      }
    }
  }
  if (config_path.empty() || !sub) return args;
  for (const auto& [key, value] : read_config_file(config_path)) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    if (given || key == "config") continue;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt) opt = app.get_option_no_throw(flag);
    if (!opt) throw UsageError("config file: unknown key '" + key + "' for this command");
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1") args.push_back(flag);
      else if (value != "false" && value != "0") throw UsageError("config file: '" + key + "' expects true/false");
    } else {
      args.push_back(flag + "=" + value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  if (const char* env = std::getenv("NEWSCLF_SEED")) {
    try {
      rc.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: NEWSCLF_SEED must be an unsigned integer\n";
      return 2;
    }
  }

  CLI::App app{"Satire / fake-news text classification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file (flags win)");
  app.add_option("--jobs", rc.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", rc.seed, "master seed (default 42, or NEWSCLF_SEED)");

  auto add_pipeline = [&](CLI::App* s) {
    s->add_flag("--no-lowercase", rc.no_lowercase, "keep case");
    s->add_option("--ngram-min", rc.ngram_min, "smallest n-gram");
    s->add_option("--ngram-max", rc.ngram_max, "largest n-gram");
    s->add_option("--max-df", rc.max_df, "drop terms in more than this fraction of documents");
    s->add_option("--min-df", rc.min_df, "keep terms in at least this many documents");
  };
  auto add_model = [&](CLI::App* s) {
    s->add_option("--model", rc.model, "svm or logreg")->check(CLI::IsMember({"svm", "logreg", "linear_svm", "lr"}));
    s->add_option("--c", rc.c, "loss weight C (svm 100, logreg 1000)");
    s->add_option("--tol", rc.tol, "solver tolerance");
    s->add_option("--max-iter", rc.max_iter, "solver iteration limit");
    s->add_flag("--no-bias", rc.no_bias, "fit without intercept");
  };
  auto add_task = [&](CLI::App* s) {
    s->add_option("--task", rc.task, "satire, paid or publisher")->check(CLI::IsMember({"satire", "paid", "publisher"}));
  };
  auto add_split = [&](CLI::App* s) {
    s->add_option("--split-kind", rc.split_kind, "random, stratified_random, publisher_holdout or kfold");
    s->add_option("--test-fraction", rc.test_fraction, "test share for random splits");
    s->add_option("--holdout", rc.holdout, "publishers held out for testing")->delimiter(',');
  };

  auto* ingest = app.add_subcommand("ingest", "validate and clean a raw corpus");
  ingest->add_option("--input", rc.input, "raw JSONL corpus")->required();
  ingest->add_option("--output", rc.output, "cleaned JSONL corpus")->required();
  ingest->add_option("--patterns", rc.patterns, "strip pattern file");
  ingest->add_option("--min-chars", rc.min_chars, "minimum body length");
  ingest->add_option("--max-chars", rc.max_chars, "maximum body length");
  ingest->add_option("--date-format", rc.date_formats, "legacy date format (repeatable)");
  ingest->add_option("--stats-out", rc.stats_out, "write corpus statistics JSON");

  auto* stats = app.add_subcommand("stats", "per-publisher and per-label counts");
  stats->add_option("--corpus", rc.corpus, "JSONL corpus")->required();
  stats->add_option("--output", rc.output, "write statistics JSON");

  auto* split = app.add_subcommand("split", "write a train/test partition");
  split->add_option("--corpus", rc.corpus, "JSONL corpus")->required();
  split->add_option("--output", rc.output, "partition JSON")->required();
  split->add_option("--folds", rc.folds, "folds for kfold");
  add_task(split);
  add_split(split);

  auto* train = app.add_subcommand("train", "fit the pipeline and write a model bundle");
  train->add_option("--corpus", rc.corpus, "cleaned JSONL corpus")->required();
  train->add_option("--output", rc.bundle, "model bundle path")->required();
  train->add_option("--split", rc.split_file, "partition JSON from `split`");
  train->add_option("--report", rc.report, "write the holdout EvalReport JSON");
  train->add_option("--vocab-out", rc.vocab_out, "write the vocabulary TSV");
  train->add_option("--matrix-out", rc.matrix_out, "write training tf-idf matrix (MatrixMarket)");
  train->add_flag("--timing", rc.timing, "record wall-clock time in reports");
  add_task(train);
  add_split(train);
  add_pipeline(train);
  add_model(train);

  auto* eval = app.add_subcommand("eval", "evaluate a bundle on a split, or run a protocol");
  eval->add_option("--corpus", rc.corpus, "cleaned JSONL corpus")->required();
  eval->add_option("--output", rc.output, "EvalReport JSON")->required();
  eval->add_option("--bundle", rc.bundle, "model bundle to evaluate");
  eval->add_option("--split", rc.split_file, "partition JSON from `split`");
  eval->add_option("--protocol", rc.protocol,
                   "satire_random, publisher_multiclass, publisher_holdout or paid_vs_editorial");
  eval->add_flag("--timing", rc.timing, "record wall-clock time in the report");
  add_task(eval);
  add_split(eval);
  add_pipeline(eval);
  add_model(eval);

  auto* curve = app.add_subcommand("curve", "learning or validation curve CSV");
  curve->add_option("--corpus", rc.corpus, "cleaned JSONL corpus")->required();
  curve->add_option("--output", rc.output, "CSV path")->required();
  curve->add_option("--kind", rc.curve_kind, "learning or validation");
  curve->add_option("--c-grid", rc.c_grid, "C values")->delimiter(',');
  curve->add_option("--sizes", rc.sizes, "training sizes")->delimiter(',');
  curve->add_option("--folds", rc.folds, "cross-validation folds");
  add_task(curve);
  add_pipeline(curve);
  add_model(curve);

  auto* grid = app.add_subcommand("gridsearch", "cross-validated search over C");
  grid->add_option("--corpus", rc.corpus, "cleaned JSONL corpus")->required();
  grid->add_option("--output", rc.output, "result JSON")->required();
  grid->add_option("--c-grid", rc.c_grid, "C values")->delimiter(',');
  grid->add_option("--folds", rc.folds, "cross-validation folds");
  add_task(grid);
  add_pipeline(grid);
  add_model(grid);

  auto* pred = app.add_subcommand("predict", "label articles with a model bundle");
  pred->add_option("--bundle", rc.bundle, "model bundle")->required();
  pred->add_option("--input", rc.input, "JSONL articles (title and body required)")->required();
  pred->add_option("--output", rc.output, "JSONL predictions")->required();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(app, std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    int rc_code = 0;
    if (*ingest) rc_code = cmd_ingest(rc);
    else if (*stats) rc_code = cmd_stats(rc);
    else if (*split) rc_code = cmd_split(rc);
    else if (*train) rc_code = cmd_train(rc);
    else if (*eval) rc_code = cmd_eval(rc);
    else if (*curve) rc_code = cmd_curve(rc);
    else if (*grid) rc_code = cmd_gridsearch(rc);
    else if (*pred) rc_code = cmd_predict(rc);
    for (const auto& p : g_outputs) std::cout << "OUT " << p << '\n';
    return rc_code;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
