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

#ifndef NEWSCLF_LINEAR_HPP_
#define NEWSCLF_LINEAR_HPP_

// L2-regularized logistic regression (primal Newton-CG) and hinge-loss
// linear SVM (dual coordinate descent), with a one-vs-rest wrapper.
//
// Both minimize  1/2 |w|^2 + C * sum_i loss(y_i (w.x_i + b)).
// The logistic bias is a free (unregularized) intercept. The SVM bias is the
// weight of an implicit constant feature 1, so it is regularized like any
// other weight and the dual keeps pure box constraints 0 <= alpha_i <= C.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newsclf/detail/parallel.hpp"
#include "newsclf/detail/random.hpp"
#include "newsclf/error.hpp"
#include "newsclf/features.hpp"

namespace newsclf {

enum class ModelKind { logreg, linear_svm };

inline std::string_view to_string(ModelKind k) { return k == ModelKind::logreg ? "logreg" : "linear_svm"; }

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "logreg" || s == "lr") return ModelKind::logreg;
  if (s == "linear_svm" || s == "svm") return ModelKind::linear_svm;
  throw InvalidArgument("unknown model kind '" + std::string(s) + "'");
}

struct SolverConfig {
  double c = 100.0;
  double tol = 1e-6;
  int max_iter = 10000;
  bool fit_bias = true;
  std::uint64_t seed = 42;

  static SolverConfig defaults_for(ModelKind kind) {
    SolverConfig cfg;
    cfg.c = kind == ModelKind::logreg ? 1000.0 : 100.0;
    return cfg;
  }

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("C must be positive and finite");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  }

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

// Raw result of one binary fit.
struct BinarySolution {
  std::vector<double> w;
  double bias = 0.0;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> alpha;  // SVM dual variables; empty for logreg
  double duality_gap = 0.0;   // SVM only
};

struct LinearModel {
  ModelKind kind = ModelKind::linear_svm;
  // Binary: {negative, positive} and a single weight vector scoring the
  // positive class. Multiclass: lexicographic, one vector per class.
  std::vector<std::string> classes;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  SolverConfig config;
  std::uint64_t vocab_fingerprint = 0;
  bool converged = true;

  bool is_binary() const noexcept { return weights.size() == 1; }
  std::size_t n_features() const noexcept { return weights.empty() ? 0 : weights.front().size(); }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

namespace detail {

// log(1 + exp(-z)) without overflow.
inline double logistic_loss(double z) { return z >= 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

// 1 / (1 + exp(-z))
inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline void check_binary_problem(const SparseMatrix& x, std::span<const int> y) {
  if (x.n_rows != y.size()) throw InvalidArgument("row count and label count differ");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw InvalidArgument("binary labels must be +1 or -1");
  }
  if (!pos || !neg) throw InvalidArgument("both classes must be present to train a binary model");
}

// Logistic objective and its pieces, shared by the solver and the tests.
struct LogregProblem {
  const SparseMatrix& x;
  std::span<const int> y;
  double c;
  bool fit_bias;

  // z_i = y_i (w.x_i + b)
  std::vector<double> margins(std::span<const double> w, double b) const {
    std::vector<double> z(x.n_rows);
    for (std::size_t i = 0; i < x.n_rows; ++i) z[i] = y[i] * (x.row_dot(i, w) + (fit_bias ? b : 0.0));
    return z;
  }

  double objective(std::span<const double> w, double b) const {
    const auto z = margins(w, b);
    double loss = 0.0;
    for (double zi : z) loss += logistic_loss(zi);
    double reg = 0.0;
    for (double v : w) reg += v * v;
    return 0.5 * reg + c * loss;
  }

  // Gradient w.r.t. (w, b); the bias component is last.
  std::vector<double> gradient(std::span<const double> w, double /*b*/, const std::vector<double>& z) const {
    std::vector<double> g(w.begin(), w.end());
    g.push_back(0.0);
    for (std::size_t i = 0; i < x.n_rows; ++i) {
      const double coef = c * (sigmoid(z[i]) - 1.0) * y[i];
      for (std::size_t k = x.row_offsets[i]; k < x.row_offsets[i + 1]; ++k) g[x.col_indices[k]] += coef * x.values[k];
      if (fit_bias) g.back() += coef;
    }
    return g;
  }

  std::vector<double> gradient(std::span<const double> w, double b) const { return gradient(w, b, margins(w, b)); }

  // H v where H = diag(1,..,1,0) + C X_a^T D X_a, X_a augmented with ones.
  void hessian_vec(const std::vector<double>& d, std::span<const double> v, std::vector<double>& out) const {
    const std::size_t n = x.n_cols;
    out.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) out[j] = v[j];
    for (std::size_t i = 0; i < x.n_rows; ++i) {
      double xv = x.row_dot(i, v.first(n)) + (fit_bias ? v[n] : 0.0);
      const double coef = c * d[i] * xv;
      for (std::size_t k = x.row_offsets[i]; k < x.row_offsets[i + 1]; ++k) out[x.col_indices[k]] += coef * x.values[k];
      if (fit_bias) out[n] += coef;
    }
  }
};

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Newton iterations with a diagonally preconditioned CG inner solve and an
// Armijo backtracking line search; stops once |grad F|_inf <= tol.
inline BinarySolution solve_logreg(const SparseMatrix& x, std::span<const int> y, const SolverConfig& cfg) {
  cfg.validate();
  check_binary_problem(x, y);
  const std::size_t n = x.n_cols;
  const std::size_t m = x.n_rows;
  LogregProblem prob{x, y, cfg.c, cfg.fit_bias};

  BinarySolution sol;
  sol.w.assign(n, 0.0);
  double b = 0.0;
  auto z = prob.margins(sol.w, b);
  std::vector<double> d(m), precond(n + 1), step(n + 1), r(n + 1), p(n + 1), zc(n + 1), hp(n + 1), u(m);

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    auto g = prob.gradient(sol.w, b, z);
    if (!cfg.fit_bias) g[n] = 0.0;
    if (inf_norm(g) <= cfg.tol) {
      sol.converged = true;
      break;
    }
    sol.iterations = iter + 1;

    for (std::size_t i = 0; i < m; ++i) {
      const double s = sigmoid(z[i]);
      d[i] = s * (1.0 - s);
    }
    std::fill(precond.begin(), precond.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) precond[j] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = x.row_offsets[i]; k < x.row_offsets[i + 1]; ++k)
        precond[x.col_indices[k]] += cfg.c * d[i] * x.values[k] * x.values[k];
      precond[n] += cfg.c * d[i];
    }
    precond[n] = cfg.fit_bias ? std::max(precond[n], 1e-12) : 1.0;

    // Preconditioned CG on H step = -g.
    const double gnorm = std::sqrt(dot(g, g));
    const double cg_tol = std::min(0.1, std::sqrt(gnorm)) * gnorm;
    std::fill(step.begin(), step.end(), 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
      r[j] = -g[j];
      zc[j] = r[j] / precond[j];
    }
    p = zc;
    double rz = dot(r, zc);
    const std::size_t max_cg = std::max<std::size_t>(n + 1, 50);
    for (std::size_t it = 0; it < max_cg; ++it) {
      if (std::sqrt(dot(r, r)) <= cg_tol) break;
      prob.hessian_vec(d, p, hp);
      if (!cfg.fit_bias) hp[n] = p[n];
      const double php = dot(p, hp);
      if (!(php > 0.0)) break;
      const double a = rz / php;
      for (std::size_t j = 0; j <= n; ++j) {
        step[j] += a * p[j];
        r[j] -= a * hp[j];
        zc[j] = r[j] / precond[j];
      }
      const double rz_new = dot(r, zc);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t j = 0; j <= n; ++j) p[j] = zc[j] + beta * p[j];
    }
    if (!cfg.fit_bias) step[n] = 0.0;

    double slope = dot(g, step);
    if (!(slope < 0.0)) {
      // CG made no progress; fall back to steepest descent.
      for (std::size_t j = 0; j <= n; ++j) step[j] = -g[j] / precond[j];
      slope = dot(g, step);
    }

    // phi(t) - phi(0) evaluated as a sum of differences to limit cancellation.
    const std::span<const double> dw(step.data(), n);
    const double w_dw = dot(sol.w, dw);
    const double dw_dw = dot(dw, dw);
    for (std::size_t i = 0; i < m; ++i) u[i] = y[i] * (x.row_dot(i, dw) + (cfg.fit_bias ? step[n] : 0.0));
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      double delta = t * w_dw + 0.5 * t * t * dw_dw;
      double dl = 0.0;
      for (std::size_t i = 0; i < m; ++i) dl += logistic_loss(z[i] + t * u[i]) - logistic_loss(z[i]);
      delta += cfg.c * dl;
      if (delta <= 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    for (std::size_t j = 0; j < n; ++j) sol.w[j] += t * step[j];
    b += t * step[n];
    for (std::size_t i = 0; i < m; ++i) z[i] += t * u[i];
    // Resync margins now and then so drift cannot build up.
    if ((iter + 1) % 10 == 0) z = prob.margins(sol.w, b);
  }
  if (!sol.converged) {
    z = prob.margins(sol.w, b);
    auto g = prob.gradient(sol.w, b, z);
    if (!cfg.fit_bias) g[n] = 0.0;
    sol.converged = inf_norm(g) <= cfg.tol;
  }
  sol.bias = cfg.fit_bias ? b : 0.0;
  sol.objective = prob.objective(sol.w, sol.bias);
  return sol;
}

// Hinge-loss primal value with the bias as augmented weight.
struct SvmProblem {
  const SparseMatrix& x;
  std::span<const int> y;
  double c;
  bool fit_bias;

  double score(std::size_t i, std::span<const double> w, double b) const {
    return x.row_dot(i, w) + (fit_bias ? b : 0.0);
  }

  double primal(std::span<const double> w, double b) const {
    double reg = dot(w, w) + (fit_bias ? b * b : 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.n_rows; ++i) loss += std::max(0.0, 1.0 - y[i] * score(i, w, b));
    return 0.5 * reg + c * loss;
  }

  // w = sum_i alpha_i y_i x_i (bias = sum_i alpha_i y_i when fitted).
  void reconstruct(std::span<const double> alpha, std::vector<double>& w, double& b) const {
    w.assign(x.n_cols, 0.0);
    b = 0.0;
    for (std::size_t i = 0; i < x.n_rows; ++i) {
      if (alpha[i] == 0.0) continue;
      const double coef = alpha[i] * y[i];
      for (std::size_t k = x.row_offsets[i]; k < x.row_offsets[i + 1]; ++k) w[x.col_indices[k]] += coef * x.values[k];
      if (fit_bias) b += coef;
    }
  }

  double dual(std::span<const double> alpha, std::span<const double> w, double b) const {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s - 0.5 * (dot(w, w) + (fit_bias ? b * b : 0.0));
  }
};

// Dual coordinate descent over alpha in [0, C]^n, coordinates visited in a
// fresh seeded permutation each epoch. After each epoch w is rebuilt from
// alpha and the run stops once primal - dual <= tol * (1 + |primal|).
inline BinarySolution solve_linear_svm(const SparseMatrix& x, std::span<const int> y, const SolverConfig& cfg) {
  cfg.validate();
  check_binary_problem(x, y);
  const std::size_t m = x.n_rows;
  const double c = cfg.c;
  SvmProblem prob{x, y, c, cfg.fit_bias};

  BinarySolution sol;
  sol.alpha.assign(m, 0.0);
  sol.w.assign(x.n_cols, 0.0);
  double b = 0.0;
  std::vector<double> qd(m);
  for (std::size_t i = 0; i < m; ++i) qd[i] = x.row_sq_norm(i) + (cfg.fit_bias ? 1.0 : 0.0);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);

  for (int epoch = 0; epoch < cfg.max_iter; ++epoch) {
    fisher_yates(order, rng);
    for (std::size_t i : order) {
      double& a = sol.alpha[i];
      if (qd[i] <= 0.0) {
        // Empty row without bias: the dual term is linear, optimum at C.
        a = c;
        continue;
      }
      const double g = y[i] * prob.score(i, sol.w, b) - 1.0;
      double pg = g;
      if (a == 0.0) pg = std::min(g, 0.0);
      else if (a == c) pg = std::max(g, 0.0);
      if (pg == 0.0) continue;
      const double old = a;
      a = std::clamp(a - g / qd[i], 0.0, c);
      const double delta = (a - old) * y[i];
      if (delta == 0.0) continue;
      for (std::size_t k = x.row_offsets[i]; k < x.row_offsets[i + 1]; ++k)
        sol.w[x.col_indices[k]] += delta * x.values[k];
      if (cfg.fit_bias) b += delta;
    }
    sol.iterations = epoch + 1;
    prob.reconstruct(sol.alpha, sol.w, b);
    const double p = prob.primal(sol.w, b);
    const double dv = prob.dual(sol.alpha, sol.w, b);
    sol.duality_gap = p - dv;
    if (sol.duality_gap <= cfg.tol * (1.0 + std::abs(p))) {
      sol.converged = true;
      break;
    }
  }
  sol.bias = cfg.fit_bias ? b : 0.0;
  sol.objective = prob.primal(sol.w, sol.bias);
  return sol;
}

inline BinarySolution solve_binary(ModelKind kind, const SparseMatrix& x, std::span<const int> y,
                                   const SolverConfig& cfg) {
  return kind == ModelKind::logreg ? solve_logreg(x, y, cfg) : solve_linear_svm(x, y, cfg);
}

inline LinearModel binary_model(ModelKind kind, BinarySolution sol, std::vector<std::string> classes,
                                const SolverConfig& cfg) {
  LinearModel model;
  model.kind = kind;
  model.classes = std::move(classes);
  model.weights.push_back(std::move(sol.w));
  model.bias.push_back(sol.bias);
  model.config = cfg;
  model.converged = sol.converged;
  return model;
}

}  // namespace detail

inline LinearModel train_logreg(const SparseMatrix& x, std::span<const int> y, const SolverConfig& cfg,
                                std::vector<std::string> classes = {"-1", "+1"}) {
  return detail::binary_model(ModelKind::logreg, detail::solve_logreg(x, y, cfg), std::move(classes), cfg);
}

inline LinearModel train_linear_svm(const SparseMatrix& x, std::span<const int> y, const SolverConfig& cfg,
                                    std::vector<std::string> classes = {"-1", "+1"}) {
  return detail::binary_model(ModelKind::linear_svm, detail::solve_linear_svm(x, y, cfg), std::move(classes), cfg);
}

// Class names sorted and deduplicated.
inline std::vector<std::string> class_set(std::span<const std::string> labels) {
  std::vector<std::string> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

// Binary fit where `positive` is scored; the other label is the negative.
inline LinearModel train_binary(ModelKind kind, const SparseMatrix& x, std::span<const std::string> labels,
                                const std::string& positive, const SolverConfig& cfg) {
  auto classes = class_set(labels);
  if (classes.size() != 2) throw InvalidArgument("a binary task needs exactly two classes, got " +
                                                 std::to_string(classes.size()));
  if (classes[0] != positive && classes[1] != positive)
    throw InvalidArgument("positive class '" + positive + "' does not occur in the labels");
  const std::string negative = classes[0] == positive ? classes[1] : classes[0];
  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == positive ? 1 : -1;
  auto sol = detail::solve_binary(kind, x, y, cfg);
  return detail::binary_model(kind, std::move(sol), {negative, positive}, cfg);
}

// One-vs-rest. Classes are ordered lexicographically; member c uses the seed
// derived from (cfg.seed, c). Two classes fall back to a single binary model
// scoring the lexicographically larger class.
inline LinearModel train_ovr(const SparseMatrix& x, std::span<const std::string> labels, const SolverConfig& cfg,
                             ModelKind kind, unsigned jobs = 1) {
  cfg.validate();
  if (x.n_rows != labels.size()) throw InvalidArgument("row count and label count differ");
  auto classes = class_set(labels);
  if (classes.size() < 2) throw InvalidArgument("one-vs-rest needs at least two classes");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  for (const auto& [cls, n] : counts)
    if (n < 2) throw InvalidArgument("class '" + cls + "' has fewer than 2 examples");
  if (classes.size() == 2) return train_binary(kind, x, labels, classes[1], cfg);

  LinearModel model;
  model.kind = kind;
  model.classes = classes;
  model.config = cfg;
  model.weights.resize(classes.size());
  model.bias.resize(classes.size());
  std::vector<char> converged(classes.size(), 0);
  detail::parallel_for(classes.size(), jobs, [&](std::size_t c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == classes[c] ? 1 : -1;
    SolverConfig member = cfg;
    member.seed = detail::derive_seed(cfg.seed, {detail::tag("ovr"), c});
    auto sol = detail::solve_binary(kind, x, y, member);
    model.weights[c] = std::move(sol.w);
    model.bias[c] = sol.bias;
    converged[c] = sol.converged;
  });
  model.converged = std::all_of(converged.begin(), converged.end(), [](char v) { return v != 0; });
  return model;
}

// One row per document; one score per weight vector (w_c . x + b_c).
inline std::vector<std::vector<double>> decision_scores(const LinearModel& model, const SparseMatrix& x) {
  if (model.weights.empty()) throw InvalidArgument("model has no weights");
  if (x.n_cols != model.n_features())
    throw InvalidArgument("feature dimension mismatch: matrix has " + std::to_string(x.n_cols) +
                          " columns, model expects " + std::to_string(model.n_features()));
  std::vector<std::vector<double>> scores(x.n_rows, std::vector<double>(model.weights.size()));
  for (std::size_t r = 0; r < x.n_rows; ++r)
    for (std::size_t c = 0; c < model.weights.size(); ++c)
      scores[r][c] = x.row_dot(r, model.weights[c]) + model.bias[c];
  return scores;
}

// Class index for one score row. Binary: positive iff score > 0. Multiclass:
// argmax, ties to the lowest index.
inline std::size_t predict_index(const LinearModel& model, std::span<const double> scores) {
  if (model.is_binary()) return scores[0] > 0.0 ? 1 : 0;
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

inline std::vector<std::string> predict(const LinearModel& model, const SparseMatrix& x) {
  const auto scores = decision_scores(model, x);
  std::vector<std::string> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(model.classes[predict_index(model, s)]);
  return out;
}

}  // namespace newsclf

#endif  // NEWSCLF_LINEAR_HPP_
