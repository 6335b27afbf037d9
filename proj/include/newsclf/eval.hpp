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

#ifndef NEWSCLF_EVAL_HPP_
#define NEWSCLF_EVAL_HPP_

// Metrics, cross-validation, learning/validation curves and the four
// experiment protocols.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "newsclf/corpus.hpp"
#include "newsclf/detail/numfmt.hpp"
#include "newsclf/detail/parallel.hpp"
#include "newsclf/detail/random.hpp"
#include "newsclf/error.hpp"
#include "newsclf/features.hpp"
#include "newsclf/linear.hpp"

namespace newsclf {

// ---------------------------------------------------------------------------
// Confusion matrix and metrics

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::uint64_t>> counts;  // [true][predicted]

  explicit ConfusionMatrix(std::vector<std::string> cls = {})
      : classes(std::move(cls)), counts(classes.size(), std::vector<std::uint64_t>(classes.size(), 0)) {}

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == label) return i;
    throw InvalidArgument("unknown class label '" + label + "'");
  }

  void add(const std::string& truth, const std::string& predicted) { ++counts[index_of(truth)][index_of(predicted)]; }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
      for (auto v : row) t += v;
    return t;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion_matrix(std::vector<std::string> classes, std::span<const std::string> truth,
                                        std::span<const std::string> predicted) {
  if (truth.size() != predicted.size()) throw InvalidArgument("truth and prediction lengths differ");
  ConfusionMatrix cm(std::move(classes));
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

// Binary: precision/recall/f1 refer to `positive`. Multiclass: they are the
// unweighted means over classes.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<std::string> positive;
  std::vector<ClassMetrics> per_class;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

// 0/0 ratios are reported as 0.
inline Metrics compute_metrics(const ConfusionMatrix& cm, std::optional<std::string> positive = std::nullopt) {
  const std::size_t k = cm.classes.size();
  Metrics m;
  const double total = static_cast<double>(cm.total());
  double trace = 0.0;
  for (std::size_t i = 0; i < k; ++i) trace += static_cast<double>(cm.counts[i][i]);
  m.accuracy = safe_ratio(trace, total);
  for (std::size_t c = 0; c < k; ++c) {
    double tp = static_cast<double>(cm.counts[c][c]), row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      row += static_cast<double>(cm.counts[c][j]);
      col += static_cast<double>(cm.counts[j][c]);
    }
    ClassMetrics cls;
    cls.label = cm.classes[c];
    cls.precision = safe_ratio(tp, col);
    cls.recall = safe_ratio(tp, row);
    cls.f1 = f1_score(cls.precision, cls.recall);
    cls.support = static_cast<std::uint64_t>(row);
    m.per_class.push_back(cls);
  }
  if (positive) {
    const auto& pc = m.per_class[cm.index_of(*positive)];
    m.precision = pc.precision;
    m.recall = pc.recall;
    m.f1 = pc.f1;
    m.positive = positive;
  } else if (k > 0) {
    for (const auto& pc : m.per_class) {
      m.precision += pc.precision;
      m.recall += pc.recall;
      m.f1 += pc.f1;
    }
    m.precision /= static_cast<double>(k);
    m.recall /= static_cast<double>(k);
    m.f1 /= static_cast<double>(k);
  }
  return m;
}

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"classes", cm.classes}, {"counts", cm.counts}};
}

inline nlohmann::json to_json(const Metrics& m) {
  nlohmann::json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["averaging"] = m.positive ? "binary" : "macro";
  if (m.positive) j["positive_class"] = *m.positive;
  auto& pc = j["per_class"] = nlohmann::json::array();
  for (const auto& c : m.per_class)
    pc.push_back({{"class", c.label}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1},
                  {"support", c.support}});
  return j;
}

// ---------------------------------------------------------------------------
// Tasks and training

enum class Task { satire, paid, publisher };

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::satire: return "satire";
    case Task::paid: return "paid";
    case Task::publisher: return "publisher";
  }
  return "?";
}

inline Task parse_task(std::string_view s) {
  if (s == "satire") return Task::satire;
  if (s == "paid") return Task::paid;
  if (s == "publisher") return Task::publisher;
  throw InvalidArgument("unknown task '" + std::string(s) + "'");
}

inline LabelField label_field(Task t) {
  switch (t) {
    case Task::satire: return LabelField::satire;
    case Task::paid: return LabelField::paid;
    case Task::publisher: return LabelField::publisher;
  }
  return LabelField::satire;
}

// Positive class of a binary task; nullopt for the multiclass task.
inline std::optional<std::string> positive_label(Task t) {
  switch (t) {
    case Task::satire: return std::string(kSatireLabel);
    case Task::paid: return std::string(kPaidLabel);
    case Task::publisher: return std::nullopt;
  }
  return std::nullopt;
}

struct ModelSpec {
  ModelKind kind = ModelKind::linear_svm;
  SolverConfig solver = SolverConfig::defaults_for(ModelKind::linear_svm);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline nlohmann::json to_json(const ModelSpec& m) {
  return {{"kind", to_string(m.kind)}, {"c", m.solver.c},       {"tol", m.solver.tol},
          {"max_iter", m.solver.max_iter}, {"fit_bias", m.solver.fit_bias}, {"seed", m.solver.seed}};
}

struct TrainedPipeline {
  FittedPipeline pipeline;
  LinearModel model;
};

// Fits vocabulary, tf-idf and the classifier on `docs` only.
inline TrainedPipeline train_on_terms(const std::vector<TermList>& docs, std::span<const std::string> labels,
                                      Task task, const PipelineParams& params, const ModelSpec& spec,
                                      unsigned jobs = 1) {
  auto fit = pipeline_fit_transform_terms(docs, params, jobs);
  TrainedPipeline out;
  if (auto pos = positive_label(task)) {
    auto classes = class_set(labels);
    if (classes.size() != 2 || std::find(classes.begin(), classes.end(), *pos) == classes.end())
      throw InvalidArgument("training data for task '" + std::string(to_string(task)) +
                            "' must contain both classes");
    out.model = train_binary(spec.kind, fit.features, labels, *pos, spec.solver);
  } else {
    out.model = train_ovr(fit.features, labels, spec.solver, spec.kind, jobs);
  }
  out.model.vocab_fingerprint = fit.pipeline.vocab.fingerprint();
  out.pipeline = std::move(fit.pipeline);
  return out;
}

inline TrainedPipeline train_pipeline(const Corpus& train, Task task, const PipelineParams& params,
                                      const ModelSpec& spec, unsigned jobs = 1) {
  const auto labels = labels_of(train, label_field(task));
  return train_on_terms(tokenize_corpus(train, params.tokenizer, jobs), labels, task, params, spec, jobs);
}

inline std::vector<std::string> predict_terms(const TrainedPipeline& tp, const std::vector<TermList>& docs,
                                              unsigned jobs = 1) {
  return predict(tp.model, tp.pipeline.transform_terms(docs, jobs));
}

inline Metrics score_predictions(const LinearModel& model, Task task, std::span<const std::string> truth,
                                 std::span<const std::string> predicted, ConfusionMatrix* cm_out = nullptr) {
  auto cm = confusion_matrix(model.classes, truth, predicted);
  auto m = compute_metrics(cm, positive_label(task));
  if (cm_out) *cm_out = std::move(cm);
  return m;
}

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldResult {
  Metrics train;
  Metrics test;
  ConfusionMatrix confusion;
};

struct CvResult {
  std::vector<FoldResult> folds;
  double train_mean = 0.0;
  double test_mean = 0.0;
  double test_std = 0.0;  // sample standard deviation
};

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct CvOptions {
  int folds = 10;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
};

namespace detail {

// Cross-validation over explicit fold assignments (fold_of[i] in [0, k)).
inline CvResult cross_validate_assigned(const std::vector<TermList>& docs, const std::vector<std::string>& labels,
                                        const std::vector<std::size_t>& fold_of, std::size_t k, Task task,
                                        const PipelineParams& params, const ModelSpec& spec, std::uint64_t seed,
                                        unsigned jobs) {
  CvResult cv;
  cv.folds.resize(k);
  parallel_for(k, jobs, [&](std::size_t f) {
    std::vector<TermList> train_docs, test_docs;
    std::vector<std::string> train_y, test_y;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (fold_of[i] == f) {
        test_docs.push_back(docs[i]);
        test_y.push_back(labels[i]);
      } else {
        train_docs.push_back(docs[i]);
        train_y.push_back(labels[i]);
      }
    }
    ModelSpec fold_spec = spec;
    fold_spec.solver.seed = derive_seed(seed, {tag(to_string(task)), f});
    auto tp = train_on_terms(train_docs, train_y, task, params, fold_spec);
    auto& out = cv.folds[f];
    out.train = score_predictions(tp.model, task, train_y, predict_terms(tp, train_docs));
    out.test = score_predictions(tp.model, task, test_y, predict_terms(tp, test_docs), &out.confusion);
  });
  std::vector<double> tr, te;
  for (const auto& f : cv.folds) {
    tr.push_back(f.train.f1);
    te.push_back(f.test.f1);
  }
  cv.train_mean = mean_of(tr);
  cv.test_mean = mean_of(te);
  cv.test_std = sample_std(te);
  return cv;
}

inline void check_class_sizes(const std::vector<std::string>& labels, std::size_t min_count, const char* what) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  for (const auto& [cls, n] : counts)
    if (n < min_count)
      throw InvalidArgument("class '" + cls + "' has " + std::to_string(n) + " documents, fewer than " + what + " (" +
                            std::to_string(min_count) + ")");
}

inline std::vector<std::size_t> fold_assignment(const Corpus& corpus, Task task, const CvOptions& opt) {
  const auto parts = make_folds(corpus, SplitSpec::kfold(opt.folds, opt.seed, label_field(task)));
  std::unordered_map<std::string, std::size_t> fold_of_id;
  for (std::size_t f = 0; f < parts.size(); ++f)
    for (const auto& id : parts[f].test_ids) fold_of_id.emplace(id, f);
  std::vector<std::size_t> fold_of(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) fold_of[i] = fold_of_id.at(corpus[i].id);
  return fold_of;
}

}  // namespace detail

// Stratified k-fold CV. Vocabulary, tf-idf and model are refit inside every
// fold on its training part; the score is F1 (macro F1 for publishers).
inline CvResult cross_validate(const Corpus& corpus, Task task, const PipelineParams& params, const ModelSpec& spec,
                               const CvOptions& opt = {}) {
  if (opt.folds < 2) throw InvalidArgument("folds must be >= 2");
  const auto labels = labels_of(corpus, label_field(task));
  detail::check_class_sizes(labels, static_cast<std::size_t>(opt.folds), "the number of folds");
  const auto fold_of = detail::fold_assignment(corpus, task, opt);
  const auto docs = tokenize_corpus(corpus, params.tokenizer, opt.jobs);
  return detail::cross_validate_assigned(docs, labels, fold_of, static_cast<std::size_t>(opt.folds), task, params,
                                         spec, opt.seed, opt.jobs);
}

// ---------------------------------------------------------------------------
// Curves

struct CurvePoint {
  double x = 0.0;
  double train_score = 0.0;
  double cv_score = 0.0;
  double cv_std = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

inline void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
  out << "x,train_score_mean,cv_score_mean,cv_score_std\n";
  for (const auto& p : points)
    out << detail::format_double(p.x) << ',' << detail::format_double(p.train_score) << ','
        << detail::format_double(p.cv_score) << ',' << detail::format_double(p.cv_std) << '\n';
}

// Stratified, seeded subsample of `size` documents kept in corpus order.
// The full size returns the corpus unchanged.
inline Corpus stratified_subsample(const Corpus& corpus, std::size_t size, LabelField field, std::uint64_t seed) {
  if (size > corpus.size()) throw InvalidArgument("subsample larger than the corpus");
  if (size == corpus.size()) return corpus;
  const double fraction = static_cast<double>(size) / static_cast<double>(corpus.size());
  auto part = make_partition(corpus, SplitSpec::stratified(fraction, seed, field));
  return select(corpus, part.test_ids);
}

inline std::vector<CurvePoint> learning_curve(const Corpus& corpus, const std::vector<std::size_t>& sizes, Task task,
                                              const PipelineParams& params, const ModelSpec& spec,
                                              const CvOptions& opt = {}) {
  if (sizes.empty()) throw InvalidArgument("learning curve needs at least one size");
  const auto n_classes = class_set(labels_of(corpus, label_field(task))).size();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw InvalidArgument("learning curve sizes must be increasing");
    if (sizes[i] > corpus.size()) throw InvalidArgument("learning curve size exceeds the corpus size");
    if (sizes[i] < static_cast<std::size_t>(opt.folds) * n_classes)
      throw InvalidArgument("learning curve size " + std::to_string(sizes[i]) + " is smaller than folds x classes");
  }
  std::vector<CurvePoint> points;
  for (auto s : sizes) {
    auto sub = stratified_subsample(corpus, s, label_field(task),
                                    detail::derive_seed(opt.seed, {detail::tag("subsample"), s}));
    auto cv = cross_validate(sub, task, params, spec, opt);
    points.push_back({static_cast<double>(s), cv.train_mean, cv.test_mean, cv.test_std});
  }
  return points;
}

inline const std::vector<double>& default_c_grid() {
  static const std::vector<double> grid = {0.01, 0.1, 1, 10, 100, 1000, 10000};
  return grid;
}

// CV score per C; folds and per-fold seeds are shared across the grid.
inline std::vector<CurvePoint> validation_curve(const Corpus& corpus, const std::vector<double>& c_grid, Task task,
                                                const PipelineParams& params, const ModelSpec& spec,
                                                const CvOptions& opt = {}) {
  if (c_grid.empty()) throw InvalidArgument("C grid is empty");
  for (double c : c_grid)
    if (!(c > 0.0)) throw InvalidArgument("C grid values must be positive");
  if (opt.folds < 2) throw InvalidArgument("folds must be >= 2");
  const auto labels = labels_of(corpus, label_field(task));
  detail::check_class_sizes(labels, static_cast<std::size_t>(opt.folds), "the number of folds");
  const auto fold_of = detail::fold_assignment(corpus, task, opt);
  const auto docs = tokenize_corpus(corpus, params.tokenizer, opt.jobs);
  std::vector<CurvePoint> points;
  for (double c : c_grid) {
    ModelSpec s = spec;
    s.solver.c = c;
    auto cv = detail::cross_validate_assigned(docs, labels, fold_of, static_cast<std::size_t>(opt.folds), task, params,
                                              s, opt.seed, opt.jobs);
    points.push_back({c, cv.train_mean, cv.test_mean, cv.test_std});
  }
  return points;
}

// ---------------------------------------------------------------------------
// Protocols

enum class Protocol { satire_random, publisher_multiclass, publisher_holdout, paid_vs_editorial };

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::satire_random: return "satire_random";
    case Protocol::publisher_multiclass: return "publisher_multiclass";
    case Protocol::publisher_holdout: return "publisher_holdout";
    case Protocol::paid_vs_editorial: return "paid_vs_editorial";
  }
  return "?";
}

inline Protocol parse_protocol(std::string_view s) {
  if (s == "satire_random") return Protocol::satire_random;
  if (s == "publisher_multiclass") return Protocol::publisher_multiclass;
  if (s == "publisher_holdout") return Protocol::publisher_holdout;
  if (s == "paid_vs_editorial") return Protocol::paid_vs_editorial;
  throw InvalidArgument("unknown protocol '" + std::string(s) + "'");
}

inline Task protocol_task(Protocol p) {
  switch (p) {
    case Protocol::publisher_multiclass: return Task::publisher;
    case Protocol::paid_vs_editorial: return Task::paid;
    default: return Task::satire;
  }
}

struct ProtocolParams {
  PipelineParams pipeline;
  ModelSpec model;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  std::vector<std::string> holdout_publishers;
  unsigned jobs = 1;
};

struct EvalReport {
  std::string protocol;
  SplitSpec split;
  ModelSpec model;
  PipelineParams pipeline;
  ConfusionMatrix confusion;
  Metrics metrics;
  double duration_seconds = 0.0;
  std::uint64_t corpus_fingerprint = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool converged = true;
};

// Wall-clock time is left out unless asked for so that reports are
// byte-reproducible.
inline nlohmann::json to_json(const EvalReport& r, bool include_timing = false) {
  nlohmann::json j;
  j["protocol"] = r.protocol;
  j["spec"] = to_json(r.split);
  j["config"] = {{"model", to_json(r.model)}, {"pipeline", to_json(r.pipeline)}};
  j["confusion_matrix"] = to_json(r.confusion);
  j["metrics"] = to_json(r.metrics);
  j["duration_seconds"] = include_timing ? nlohmann::json(r.duration_seconds) : nlohmann::json(nullptr);
  j["corpus_fingerprint"] = detail::to_hex(r.corpus_fingerprint);
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["converged"] = r.converged;
  return j;
}

// Articles usable for `task`: the paid task only sees articles with a paid
// label.
inline Corpus task_subset(const Corpus& corpus, Task task) {
  if (task != Task::paid) return corpus;
  Corpus out;
  for (const auto& a : corpus)
    if (a.paid) out.push_back(a);
  return out;
}

inline SplitSpec protocol_split(Protocol p, const ProtocolParams& params) {
  const auto field = label_field(protocol_task(p));
  if (p == Protocol::publisher_holdout) {
    if (params.holdout_publishers.empty()) throw InvalidArgument("publisher_holdout needs holdout publishers");
    return SplitSpec::holdout(params.holdout_publishers, field);
  }
  return SplitSpec::random(params.test_fraction, params.seed, field);
}

// Fits on `train`, scores `test`.
inline EvalReport evaluate_split(const Corpus& train, const Corpus& test, Task task, const ProtocolParams& params,
                                 TrainedPipeline* trained = nullptr) {
  EvalReport r;
  auto tp = train_pipeline(train, task, params.pipeline, params.model, params.jobs);
  const auto truth = labels_of(test, label_field(task));
  const auto predicted = predict(tp.model, tp.pipeline.transform(test, params.jobs));
  r.metrics = score_predictions(tp.model, task, truth, predicted, &r.confusion);
  r.model = params.model;
  r.pipeline = params.pipeline;
  r.n_train = train.size();
  r.n_test = test.size();
  r.converged = tp.model.converged;
  if (trained) *trained = std::move(tp);
  return r;
}

inline void check_protocol_inputs(const Corpus& corpus, Protocol p, const ProtocolParams& params) {
  const Task task = protocol_task(p);
  const auto subset = task_subset(corpus, task);
  if (subset.empty()) throw InvalidArgument("corpus has no articles labelled for task '" +
                                            std::string(to_string(task)) + "'");
  const auto classes = class_set(labels_of(subset, label_field(task)));
  if (classes.size() < 2) throw InvalidArgument("corpus has fewer than two classes for this protocol");
  if (p == Protocol::publisher_holdout) {
    std::set<std::string> present;
    for (const auto& a : corpus) present.insert(a.publisher);
    for (const auto& h : params.holdout_publishers)
      if (!present.count(h)) throw InvalidArgument("holdout publisher '" + h + "' does not occur in the corpus");
  }
}

inline EvalReport run_protocol(const Corpus& corpus, Protocol p, const ProtocolParams& params) {
  const auto start = std::chrono::steady_clock::now();
  check_protocol_inputs(corpus, p, params);
  const Task task = protocol_task(p);
  const auto subset = task_subset(corpus, task);
  const auto split = protocol_split(p, params);
  const auto part = make_partition(subset, split);
  auto report = evaluate_split(select(subset, part.train_ids), select(subset, part.test_ids), task, params);
  report.protocol = std::string(to_string(p));
  report.split = split;
  report.corpus_fingerprint = corpus_fingerprint(corpus);
  report.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace newsclf

#endif  // NEWSCLF_EVAL_HPP_
