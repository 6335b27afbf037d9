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

#include <gtest/gtest.h>

#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "newsclf/features.hpp"
#include "support/oracles.hpp"
#include "support/synthetic_corpus.hpp"
#include "support/toy_corpus.hpp"

namespace newsclf {
namespace {

using Terms = std::vector<std::string>;

TEST(Tokenize, UnigramsThenBigrams) {
  EXPECT_EQ(tokenize("Die Katze schläft.", {}),
            (Terms{"die", "katze", "schläft", "die katze", "katze schläft"}));
  EXPECT_EQ(tokenize("A1 b2", {}), (Terms{"a1", "b2", "a1 b2"}));
  EXPECT_TRUE(tokenize("", {}).empty());
}

TEST(Tokenize, DropsSingleCharactersAndPunctuation) {
  EXPECT_EQ(tokenize("a bc, d-ef!", {}), (Terms{"bc", "ef", "bc ef"}));
  EXPECT_EQ(tokenize("x", {}), Terms{});
}

TEST(Tokenize, UnicodeLettersAndCaseFolding) {
  EXPECT_EQ(tokenize("ÄRGER Über", {}), (Terms{"ärger", "über", "ärger über"}));
  TokenizerConfig keep;
  keep.lowercase = false;
  EXPECT_EQ(tokenize("ÄRGER Über", keep), (Terms{"ÄRGER", "Über", "ÄRGER Über"}));
  // Greek and Cyrillic are letters too.
  EXPECT_EQ(tokenize("ΑΒΓ Дом", {}), (Terms{"αβγ", "дом", "αβγ дом"}));
}

TEST(Tokenize, NgramRange) {
  TokenizerConfig cfg;
  cfg.ngram_min = 2;
  cfg.ngram_max = 3;
  EXPECT_EQ(tokenize("aa bb cc", cfg), (Terms{"aa bb", "bb cc", "aa bb cc"}));
  cfg.ngram_min = 3;
  cfg.ngram_max = 2;
  EXPECT_THROW(tokenize("aa", cfg), InvalidArgument);
}

TEST(Tokenize, CaseFoldingIdempotence) {
  const std::vector<std::string> samples = {"Die KATZE schläft", "ÄÖÜ äöü ẞtraße", "MiXeD 42 Case",
                                            "İstanbul ΣΊΣΥΦΟΣ", ""};
  for (const auto& s : samples) EXPECT_EQ(tokenize(detail::fold_case(s), {}), tokenize(s, {})) << s;
}

// ---------------------------------------------------------------------------

TEST(FitVocabulary, HandCountedExample) {
  auto v = fit_vocabulary({{"a", "b"}, {"a"}, {"a", "c"}}, 1.0, 1);
  EXPECT_EQ(v.terms(), (Terms{"a", "b", "c"}));
  EXPECT_EQ(v.doc_freq(), (std::vector<std::uint64_t>{3, 1, 1}));
  EXPECT_EQ(v.n_docs(), 3u);
}

TEST(FitVocabulary, MaxDfExcludesTermsAboveRatio) {
  std::vector<TermList> docs(100);
  for (int i = 0; i < 100; ++i) {
    docs[i].push_back("filler");
    if (i < 85) docs[i].push_back("common");
    if (i < 80) docs[i].push_back("edge");
  }
  auto v = fit_vocabulary(docs, 0.8, 1);
  EXPECT_FALSE(v.find("common").has_value());
  EXPECT_FALSE(v.find("filler").has_value());
  EXPECT_TRUE(v.find("edge").has_value());
}

TEST(FitVocabulary, MinDfBoundaryIsInclusive) {
  std::vector<TermList> docs(100, TermList{"pad"});
  for (int i = 0; i < 19; ++i) docs[i].push_back("rare");
  for (int i = 0; i < 20; ++i) docs[i].push_back("enough");
  auto v = fit_vocabulary(docs, 0.8, 20);
  EXPECT_EQ(v.terms(), Terms{"enough"});
}

TEST(FitVocabulary, ErrorsAndDeterminism) {
  EXPECT_THROW(fit_vocabulary({}, 0.8, 1), InvalidArgument);
  EXPECT_THROW(fit_vocabulary({{"a"}, {"a"}}, 0.8, 1), InvalidArgument);  // empty vocabulary
  auto corpus = testing::make_synthetic_corpus(
      {{{"a", false, 60}, {"b", true, 40}}, testing::MarkerMode::class_shared, 300, 10, 40, 3, 5});
  auto docs = tokenize_corpus(corpus, {});
  EXPECT_EQ(fit_vocabulary(docs, 0.8, 3), fit_vocabulary(docs, 0.8, 3));
  auto v = fit_vocabulary(docs, 0.8, 3);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v.terms()[i - 1], v.terms()[i]);
  for (auto df : v.doc_freq()) {
    EXPECT_GE(df, 3u);
    EXPECT_LE(df, 80u);
  }
}

TEST(MaxDfCount, FloorsWithoutRepresentationError) {
  EXPECT_EQ(max_df_count(0.8, 100), 80u);
  EXPECT_EQ(max_df_count(0.29, 100), 29u);
  EXPECT_EQ(max_df_count(0.8, 63868), 51094u);
}

// ---------------------------------------------------------------------------

TEST(CountVectorize, Counts) {
  Vocabulary v({"a", "b"}, {1, 1}, 1, 1.0, 1);
  auto m = count_vectorize({{"a", "a", "b"}, {"z"}}, v);
  m.validate();
  ASSERT_EQ(m.n_rows, 2u);
  EXPECT_EQ(std::vector<double>(m.row_values(0).begin(), m.row_values(0).end()), (std::vector<double>{2, 1}));
  EXPECT_EQ(m.row_values(1).size(), 0u);
}

TEST(CountVectorize, FitExampleMatrix) {
  std::vector<TermList> docs = {{"a", "b"}, {"a"}, {"a", "c"}};
  auto m = count_vectorize(docs, fit_vocabulary(docs, 1.0, 1));
  EXPECT_EQ(m.n_rows, 3u);
  EXPECT_EQ(m.n_cols, 3u);
  // (0,a) (0,b) (1,a) (2,a) (2,c)
  EXPECT_EQ(m.nnz(), 5u);
}

TEST(CountVectorize, PreservesInVocabularyTokenCount) {
  auto corpus = testing::make_synthetic_corpus(
      {{{"a", false, 50}, {"b", true, 30}}, testing::MarkerMode::publisher_specific, 400, 10, 50, 4, 11});
  auto docs = tokenize_corpus(corpus, {});
  auto v = fit_vocabulary(docs, 0.8, 2);
  auto m = count_vectorize(docs, v, 3);
  m.validate();
  double total = 0;
  for (double x : m.values) total += x;
  std::size_t expected = 0;
  for (const auto& d : docs)
    for (const auto& t : d) expected += v.find(t).has_value();
  EXPECT_EQ(total, static_cast<double>(expected));
}

// ---------------------------------------------------------------------------

TEST(FitTfidf, SmoothIdfValues) {
  // Column 0 in all 3 rows, column 1 in 2 rows, column 2 in 1 row.
  SparseMatrix m;
  m.n_cols = 3;
  std::vector<std::pair<std::uint32_t, double>> r0{{0, 1}, {1, 1}, {2, 1}}, r1{{0, 2}, {1, 1}}, r2{{0, 1}};
  m.push_row(r0);
  m.push_row(r1);
  m.push_row(r2);
  auto model = fit_tfidf(m);
  EXPECT_DOUBLE_EQ(model.idf[0], 1.0);
  EXPECT_NEAR(model.idf[1], 1.2876820724517809, 1e-15);
  EXPECT_NEAR(model.idf[2], 1.6931471805599454, 1e-15);
}

TEST(TransformTfidf, NormalizesRows) {
  SparseMatrix m;
  m.n_cols = 2;
  std::vector<std::pair<std::uint32_t, double>> single{{1, 3}}, pair{{0, 2}, {1, 1}}, empty;
  m.push_row(single);
  m.push_row(pair);
  m.push_row(empty);
  TfidfModel model{{1.0, std::log(2.0) + 1.0}};
  auto t = transform_tfidf(m, model);
  EXPECT_EQ(t.row_values(0)[0], 1.0);
  // Exact arithmetic: [2, 1 + ln 2] / sqrt(4 + (1 + ln 2)^2).
  const long double idf = std::log(2.0L) + 1.0L;
  const long double norm = std::sqrt(4.0L + idf * idf);
  EXPECT_NEAR(t.row_values(1)[0], static_cast<double>(2.0L / norm), 1e-9);
  EXPECT_NEAR(t.row_values(1)[1], static_cast<double>(idf / norm), 1e-9);
  EXPECT_EQ(t.row_values(2).size(), 0u);
  EXPECT_THROW(transform_tfidf(m, TfidfModel{{1.0}}), InvalidArgument);
}

TEST(TransformTfidf, PropertiesOnGeneratedCorpus) {
  auto corpus = testing::make_synthetic_corpus(
      {{{"a", false, 70}, {"b", true, 50}}, testing::MarkerMode::publisher_specific, 500, 10, 60, 4, 21});
  PipelineParams params;
  params.min_df_count = 2;
  auto fit = pipeline_fit_transform(corpus, params);
  const auto& x = fit.features;
  x.validate();
  for (std::size_t r = 0; r < x.n_rows; ++r) {
    const double sq = x.row_sq_norm(r);
    if (x.row_values(r).empty()) continue;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-12);
  }
  // idf >= 1 and non-increasing in df.
  const auto& idf = fit.pipeline.tfidf.idf;
  const auto& df = fit.pipeline.vocab.doc_freq();
  for (std::size_t t = 0; t < idf.size(); ++t) {
    EXPECT_GE(idf[t], 1.0);
    for (std::size_t u = t + 1; u < std::min(idf.size(), t + 50); ++u)
      if (df[t] <= df[u]) {
        EXPECT_GE(idf[t], idf[u]);
      }
  }
  // Row separability: transforming one row alone gives the same row.
  auto docs = tokenize_corpus(corpus, params.tokenizer);
  auto counts = count_vectorize(docs, fit.pipeline.vocab);
  for (std::size_t r : {0u, 7u, 119u}) {
    std::vector<std::size_t> rows{r};
    auto one = transform_tfidf(counts.select_rows(rows), fit.pipeline.tfidf);
    ASSERT_EQ(one.nnz(), x.row_values(r).size());
    for (std::size_t k = 0; k < one.nnz(); ++k) EXPECT_EQ(one.values[k], x.row_values(r)[k]);
  }
}

// ---------------------------------------------------------------------------

using testing::ascii_ngrams;
using testing::toy_corpus;

TEST(Pipeline, ToyCorpusMatchesReference) {
  const auto corpus = toy_corpus();
  PipelineParams params;
  params.min_df_count = 2;
  params.max_df_ratio = 0.8;
  auto fit = pipeline_fit_transform(corpus, params);

  std::vector<TermList> docs;
  for (const auto& a : corpus) docs.push_back(ascii_ngrams(a.title + "\n" + a.body));
  std::map<std::string, int> df;
  for (const auto& d : docs)
    for (const auto& t : std::set<std::string>(d.begin(), d.end())) ++df[t];
  std::set<std::string> vocab;
  for (const auto& [t, n] : df)
    if (n >= 2 && n <= 4) vocab.insert(t);
  EXPECT_EQ(std::set<std::string>(fit.pipeline.vocab.terms().begin(), fit.pipeline.vocab.terms().end()), vocab);
  EXPECT_FALSE(vocab.count("die"));  // in all five documents

  const auto ref = testing::tfidf_reference(docs, vocab);
  const auto& x = fit.features;
  ASSERT_EQ(x.n_rows, 5u);
  for (std::size_t r = 0; r < 5; ++r) {
    ASSERT_EQ(x.row_values(r).size(), ref[r].size());
    for (std::size_t k = 0; k < x.row_cols(r).size(); ++k) {
      const auto& term = fit.pipeline.vocab.terms()[x.row_cols(r)[k]];
      EXPECT_NEAR(x.row_values(r)[k], static_cast<double>(ref[r].at(term)), 1e-9) << term;
    }
  }
}

TEST(Pipeline, SingleArticleKeepsEveryNgram) {
  Corpus c(1);
  c[0].title = "Kurz";
  c[0].body = "Eine kurze Meldung, kurz gesagt.";
  PipelineParams params;
  params.min_df_count = 1;
  params.max_df_ratio = 1.0;
  auto fit = pipeline_fit_transform(c, params);
  auto grams = tokenize(document_text(c[0]), {});
  std::set<std::string> uniq(grams.begin(), grams.end());
  EXPECT_EQ(std::set<std::string>(fit.pipeline.vocab.terms().begin(), fit.pipeline.vocab.terms().end()), uniq);
  EXPECT_TRUE(uniq.count("kurz eine"));  // bigram across the title/body boundary
}

TEST(Pipeline, IdenticalArticlesGiveIdenticalRows) {
  auto c = toy_corpus();
  c.push_back(c[2]);
  c.back().id = "copy";
  PipelineParams params;
  params.min_df_count = 1;
  auto fit = pipeline_fit_transform(c, params);
  const auto last = fit.features.n_rows - 1;
  EXPECT_TRUE(std::equal(fit.features.row_values(2).begin(), fit.features.row_values(2).end(),
                         fit.features.row_values(last).begin(), fit.features.row_values(last).end()));
}

TEST(Exports, VocabularyTsvAndMatrixMarket) {
  std::vector<TermList> docs = {{"a", "b"}, {"a"}, {"a", "c"}};
  auto v = fit_vocabulary(docs, 1.0, 1);
  auto counts = count_vectorize(docs, v);
  auto model = fit_tfidf(counts);
  std::ostringstream tsv;
  write_vocabulary_tsv(tsv, v, model);
  EXPECT_EQ(tsv.str(), "a\t3\t1\nb\t1\t1.6931471805599454\nc\t1\t1.6931471805599454\n");
  std::ostringstream mm;
  write_matrix_market(mm, counts);
  EXPECT_EQ(mm.str(), "%%MatrixMarket matrix coordinate real general\n3 3 5\n1 1 1\n1 2 1\n2 1 1\n3 1 1\n3 3 1\n");
}

}  // namespace
}  // namespace newsclf
