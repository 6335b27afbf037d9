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

#ifndef NEWSCLF_FEATURES_HPP_
#define NEWSCLF_FEATURES_HPP_

// Tokenization, document-frequency filtered vocabulary, CSR count matrices
// and smooth-idf / L2 tf-idf weighting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "newsclf/corpus.hpp"
#include "newsclf/detail/hash.hpp"
#include "newsclf/detail/numfmt.hpp"
#include "newsclf/detail/parallel.hpp"
#include "newsclf/detail/utf8.hpp"
#include "newsclf/error.hpp"

namespace newsclf {

struct TokenizerConfig {
  bool lowercase = true;
  int ngram_min = 1;
  int ngram_max = 2;

  void validate() const {
    if (ngram_min < 1 || ngram_min > ngram_max) throw InvalidArgument("n-gram range must satisfy 1 <= min <= max");
  }
  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

using TermList = std::vector<std::string>;

// Maximal runs of letters/digits with at least two code points.
inline std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t cps = 0;
  auto flush = [&] {
    if (cps >= 2) tokens.push_back(std::move(current));
    current.clear();
    cps = 0;
  };
  int32_t i = 0;
  const auto n = static_cast<int32_t>(text.size());
  while (i < n) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(text.data(), i, n, c);
    if (c >= 0 && detail::is_token_char(c)) {
      current.append(text.data() + start, static_cast<std::size_t>(i - start));
      ++cps;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

// All n-grams for n = ngram_min..ngram_max, grouped by n, each group in
// reading order. N-gram parts are joined by a single space.
inline TermList tokenize(std::string_view text, const TokenizerConfig& cfg) {
  cfg.validate();
  const auto tokens = cfg.lowercase ? split_tokens(detail::fold_case(text)) : split_tokens(text);
  TermList out;
  for (int n = cfg.ngram_min; n <= cfg.ngram_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (tokens.size() < un) break;
    for (std::size_t i = 0; i + un <= tokens.size(); ++i) {
      if (n == 1) {
        out.push_back(tokens[i]);
        continue;
      }
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < un; ++k) {
        gram += ' ';
        gram += tokens[i + k];
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> doc_freq, std::uint64_t n_docs,
             double max_df_ratio, std::uint64_t min_df_count)
      : terms_(std::move(terms)),
        doc_freq_(std::move(doc_freq)),
        n_docs_(n_docs),
        max_df_ratio_(max_df_ratio),
        min_df_count_(min_df_count) {
    if (terms_.size() != doc_freq_.size()) throw InvalidArgument("vocabulary terms and doc_freq differ in length");
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i > 0 && !(terms_[i - 1] < terms_[i])) throw InvalidArgument("vocabulary terms must be strictly sorted");
      index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    }
  }

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint64_t>& doc_freq() const noexcept { return doc_freq_; }
  std::uint64_t n_docs() const noexcept { return n_docs_; }
  double max_df_ratio() const noexcept { return max_df_ratio_; }
  std::uint64_t min_df_count() const noexcept { return min_df_count_; }

  std::optional<std::uint32_t> find(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t fingerprint() const {
    detail::Fnv1a h;
    for (const auto& t : terms_) h.field(t);
    return h.digest();
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.doc_freq_ == b.doc_freq_ && a.n_docs_ == b.n_docs_ &&
           a.max_df_ratio_ == b.max_df_ratio_ && a.min_df_count_ == b.min_df_count_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> doc_freq_;
  std::uint64_t n_docs_ = 0;
  double max_df_ratio_ = 0.8;
  std::uint64_t min_df_count_ = 20;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Largest document frequency a retained term may have.
inline std::uint64_t max_df_count(double max_df_ratio, std::uint64_t n_docs) {
  // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
  return static_cast<std::uint64_t>(std::floor(max_df_ratio * static_cast<double>(n_docs) + 1e-9));
}

// Keeps terms with min_df_count <= df <= floor(max_df_ratio * n_docs).
inline Vocabulary fit_vocabulary(const std::vector<TermList>& docs, double max_df_ratio, std::uint64_t min_df_count) {
  if (docs.empty()) throw InvalidArgument("cannot fit a vocabulary on zero documents");
  if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0)) throw InvalidArgument("max_df_ratio must lie in (0, 1]");
  std::unordered_map<std::string_view, std::uint64_t> df;
  std::vector<std::string_view> seen;
  for (const auto& doc : docs) {
    seen.assign(doc.begin(), doc.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto t : seen) ++df[t];
  }
  const auto upper = max_df_count(max_df_ratio, docs.size());
  std::vector<std::pair<std::string_view, std::uint64_t>> kept;
  for (const auto& [term, count] : df)
    if (count >= min_df_count && count <= upper) kept.emplace_back(term, count);
  if (kept.empty()) throw InvalidArgument("empty vocabulary: every term was filtered by the document-frequency limits");
  std::sort(kept.begin(), kept.end());
  std::vector<std::string> terms;
  std::vector<std::uint64_t> freq;
  terms.reserve(kept.size());
  freq.reserve(kept.size());
  for (const auto& [term, count] : kept) {
    terms.emplace_back(term);
    freq.push_back(count);
  }
  return Vocabulary(std::move(terms), std::move(freq), docs.size(), max_df_ratio, min_df_count);
}

// ---------------------------------------------------------------------------

// Compressed sparse rows.
struct SparseMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::uint32_t> col_indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return values.size(); }
  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {col_indices.data() + row_offsets[r], row_offsets[r + 1] - row_offsets[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values.data() + row_offsets[r], row_offsets[r + 1] - row_offsets[r]};
  }

  double row_dot(std::size_t r, std::span<const double> dense) const {
    double s = 0.0;
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) s += values[k] * dense[col_indices[k]];
    return s;
  }
  double row_sq_norm(std::size_t r) const {
    double s = 0.0;
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) s += values[k] * values[k];
    return s;
  }

  // Appends a row; columns must be strictly increasing.
  void push_row(std::span<const std::pair<std::uint32_t, double>> entries) {
    for (const auto& [c, v] : entries) {
      col_indices.push_back(c);
      values.push_back(v);
    }
    row_offsets.push_back(values.size());
    ++n_rows;
  }

  // Rows `rows` of this matrix, in the given order.
  SparseMatrix select_rows(std::span<const std::size_t> rows) const {
    SparseMatrix out;
    out.n_cols = n_cols;
    for (auto r : rows) {
      for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
        out.col_indices.push_back(col_indices[k]);
        out.values.push_back(values[k]);
      }
      out.row_offsets.push_back(out.values.size());
      ++out.n_rows;
    }
    return out;
  }

  void validate() const {
    if (row_offsets.size() != n_rows + 1 || row_offsets.front() != 0 || row_offsets.back() != values.size() ||
        col_indices.size() != values.size())
      throw InvalidArgument("sparse matrix offsets are inconsistent");
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (row_offsets[r] > row_offsets[r + 1]) throw InvalidArgument("sparse matrix offsets are not monotone");
      for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
        if (col_indices[k] >= n_cols) throw InvalidArgument("sparse matrix column index out of range");
        if (k > row_offsets[r] && col_indices[k - 1] >= col_indices[k])
          throw InvalidArgument("sparse matrix columns not strictly increasing within a row");
      }
    }
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;
};

inline void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.n_rows << ' ' << m.n_cols << ' ' << m.nnz() << '\n';
  for (std::size_t r = 0; r < m.n_rows; ++r)
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k)
      out << (r + 1) << ' ' << (m.col_indices[k] + 1) << ' ' << detail::format_double(m.values[k]) << '\n';
}

namespace detail {

inline void count_row(const TermList& doc, const Vocabulary& vocab,
                      std::vector<std::pair<std::uint32_t, double>>& entries) {
  std::vector<std::uint32_t> cols;
  cols.reserve(doc.size());
  for (const auto& t : doc)
    if (auto c = vocab.find(t)) cols.push_back(*c);
  std::sort(cols.begin(), cols.end());
  entries.clear();
  for (std::size_t i = 0; i < cols.size();) {
    std::size_t j = i;
    while (j < cols.size() && cols[j] == cols[i]) ++j;
    entries.emplace_back(cols[i], static_cast<double>(j - i));
    i = j;
  }
}

}  // namespace detail

// Term counts; out-of-vocabulary terms are ignored.
inline SparseMatrix count_vectorize(const std::vector<TermList>& docs, const Vocabulary& vocab, unsigned jobs = 1) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(docs.size());
  detail::parallel_for(docs.size(), jobs, [&](std::size_t i) { detail::count_row(docs[i], vocab, rows[i]); });
  SparseMatrix m;
  m.n_cols = vocab.size();
  for (const auto& r : rows) m.push_row(r);
  return m;
}

// ---------------------------------------------------------------------------

struct TfidfModel {
  std::vector<double> idf;
  static constexpr bool sublinear_tf = false;  // raw counts
  static constexpr std::string_view normalize = "l2";

  friend bool operator==(const TfidfModel&, const TfidfModel&) = default;
};

// Smooth idf: ln((1 + N) / (1 + df)) + 1.
inline double smooth_idf(std::uint64_t n_docs, std::uint64_t df) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

inline TfidfModel fit_tfidf(const SparseMatrix& counts) {
  if (counts.n_rows == 0) throw InvalidArgument("cannot fit tf-idf on an empty matrix");
  std::vector<std::uint64_t> df(counts.n_cols, 0);
  for (std::size_t k = 0; k < counts.nnz(); ++k)
    if (counts.values[k] != 0.0) ++df[counts.col_indices[k]];
  TfidfModel model;
  model.idf.resize(counts.n_cols);
  for (std::size_t t = 0; t < counts.n_cols; ++t) model.idf[t] = smooth_idf(counts.n_rows, df[t]);
  return model;
}

// count * idf, then each nonzero row scaled to unit L2 norm.
inline SparseMatrix transform_tfidf(const SparseMatrix& counts, const TfidfModel& model) {
  if (model.idf.size() != counts.n_cols) throw InvalidArgument("idf length does not match matrix width");
  SparseMatrix out = counts;
  for (std::size_t r = 0; r < out.n_rows; ++r) {
    double sq = 0.0;
    for (std::size_t k = out.row_offsets[r]; k < out.row_offsets[r + 1]; ++k) {
      out.values[k] *= model.idf[out.col_indices[k]];
      sq += out.values[k] * out.values[k];
    }
    if (sq == 0.0) continue;
    const double norm = std::sqrt(sq);
    for (std::size_t k = out.row_offsets[r]; k < out.row_offsets[r + 1]; ++k) out.values[k] /= norm;
  }
  return out;
}

// term TAB doc_freq TAB idf, one line per term.
inline void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab, const TfidfModel& model) {
  for (std::size_t t = 0; t < vocab.size(); ++t)
    out << vocab.terms()[t] << '\t' << vocab.doc_freq()[t] << '\t' << detail::format_double(model.idf[t]) << '\n';
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineParams {
  TokenizerConfig tokenizer;
  double max_df_ratio = 0.8;
  std::uint64_t min_df_count = 20;

  friend bool operator==(const PipelineParams&, const PipelineParams&) = default;
};

inline nlohmann::json to_json(const PipelineParams& p) {
  nlohmann::json j;
  j["lowercase"] = p.tokenizer.lowercase;
  j["ngram_min"] = p.tokenizer.ngram_min;
  j["ngram_max"] = p.tokenizer.ngram_max;
  j["max_df_ratio"] = p.max_df_ratio;
  j["min_df_count"] = p.min_df_count;
  return j;
}

inline std::string document_text(const Article& a) { return a.title + "\n" + a.body; }

inline std::vector<TermList> tokenize_corpus(const Corpus& corpus, const TokenizerConfig& cfg, unsigned jobs = 1) {
  cfg.validate();
  std::vector<TermList> docs(corpus.size());
  detail::parallel_for(corpus.size(), jobs, [&](std::size_t i) { docs[i] = tokenize(document_text(corpus[i]), cfg); });
  return docs;
}

struct FittedPipeline {
  TokenizerConfig tokenizer;
  Vocabulary vocab;
  TfidfModel tfidf;

  SparseMatrix transform_terms(const std::vector<TermList>& docs, unsigned jobs = 1) const {
    return transform_tfidf(count_vectorize(docs, vocab, jobs), tfidf);
  }
  SparseMatrix transform(const Corpus& corpus, unsigned jobs = 1) const {
    return transform_terms(tokenize_corpus(corpus, tokenizer, jobs), jobs);
  }

  friend bool operator==(const FittedPipeline&, const FittedPipeline&) = default;
};

struct PipelineFit {
  FittedPipeline pipeline;
  SparseMatrix features;  // tf-idf rows of the fitting documents
};

inline PipelineFit pipeline_fit_transform_terms(const std::vector<TermList>& docs, const PipelineParams& params,
                                                unsigned jobs = 1) {
  PipelineFit fit;
  fit.pipeline.tokenizer = params.tokenizer;
  fit.pipeline.vocab = fit_vocabulary(docs, params.max_df_ratio, params.min_df_count);
  auto counts = count_vectorize(docs, fit.pipeline.vocab, jobs);
  fit.pipeline.tfidf = fit_tfidf(counts);
  fit.features = transform_tfidf(counts, fit.pipeline.tfidf);
  return fit;
}

inline PipelineFit pipeline_fit_transform(const Corpus& articles, const PipelineParams& params, unsigned jobs = 1) {
  return pipeline_fit_transform_terms(tokenize_corpus(articles, params.tokenizer, jobs), params, jobs);
}

}  // namespace newsclf

#endif  // NEWSCLF_FEATURES_HPP_
