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

#ifndef NEWSCLF_PERSIST_HPP_
#define NEWSCLF_PERSIST_HPP_

// Model bundle file:
//
//   NEWSCLF-BUNDLE v1 <16 hex digits FNV-1a of the body>\n
//   <JSON body>
//
// Reals in the body are strings holding the shortest decimal that parses
// back to the same double.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsclf/detail/hash.hpp"
#include "newsclf/detail/numfmt.hpp"
#include "newsclf/error.hpp"
#include "newsclf/eval.hpp"
#include "newsclf/features.hpp"
#include "newsclf/linear.hpp"

namespace newsclf {

inline constexpr int kBundleFormatVersion = 1;
inline constexpr std::string_view kBundleMagic = "NEWSCLF-BUNDLE";

struct ModelBundle {
  int format_version = kBundleFormatVersion;
  std::string task;
  FittedPipeline pipeline;
  LinearModel model;
  std::uint64_t corpus_fingerprint = 0;

  void validate() const {
    const auto v = pipeline.vocab.size();
    if (pipeline.tfidf.idf.size() != v) throw InvalidArgument("bundle: idf length differs from vocabulary size");
    if (model.weights.empty()) throw InvalidArgument("bundle: model has no weight vectors");
    if (model.bias.size() != model.weights.size()) throw InvalidArgument("bundle: bias count differs from weight count");
    const auto expect = model.classes.size() == 2 ? 1 : model.classes.size();
    if (model.classes.size() < 2 || model.weights.size() != expect)
      throw InvalidArgument("bundle: class list does not match weight vectors");
    for (const auto& w : model.weights) {
      if (w.size() != v) throw InvalidArgument("bundle: weight length differs from vocabulary size");
      for (double x : w)
        if (!std::isfinite(x)) throw InvalidArgument("bundle: non-finite weight");
    }
    for (double b : model.bias)
      if (!std::isfinite(b)) throw InvalidArgument("bundle: non-finite bias");
  }

  // Tokenize, vectorize and score raw articles.
  std::vector<std::vector<double>> scores(const Corpus& articles, unsigned jobs = 1) const {
    return decision_scores(model, pipeline.transform(articles, jobs));
  }

  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

inline ModelBundle make_bundle(TrainedPipeline tp, Task task, std::uint64_t corpus_fp) {
  ModelBundle b;
  b.task = std::string(to_string(task));
  b.pipeline = std::move(tp.pipeline);
  b.model = std::move(tp.model);
  b.corpus_fingerprint = corpus_fp;
  return b;
}

namespace detail {

inline nlohmann::json real_array(const std::vector<double>& v) {
  auto a = nlohmann::json::array();
  for (double x : v) a.push_back(format_double(x));
  return a;
}

inline double real_from(const nlohmann::json& j) {
  if (!j.is_string()) throw FormatError("bundle: real number must be encoded as a string");
  auto v = parse_double(j.get_ref<const std::string&>());
  if (!v) throw FormatError("bundle: bad real number \"" + j.get<std::string>() + "\"");
  return *v;
}

inline std::vector<double> reals_from(const nlohmann::json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(real_from(e));
  return out;
}

inline std::string bundle_body(const ModelBundle& b) {
  nlohmann::json j;
  j["format_version"] = b.format_version;
  j["task"] = b.task;
  j["corpus_fingerprint"] = to_hex(b.corpus_fingerprint);
  const auto& tok = b.pipeline.tokenizer;
  j["tokenizer"] = {{"lowercase", tok.lowercase}, {"ngram_min", tok.ngram_min}, {"ngram_max", tok.ngram_max}};
  const auto& voc = b.pipeline.vocab;
  j["vocabulary"] = {{"terms", voc.terms()},
                     {"doc_freq", voc.doc_freq()},
                     {"n_docs", voc.n_docs()},
                     {"max_df_ratio", format_double(voc.max_df_ratio())},
                     {"min_df_count", voc.min_df_count()},
                     {"idf", real_array(b.pipeline.tfidf.idf)}};
  const auto& m = b.model;
  auto weights = nlohmann::json::array();
  for (const auto& w : m.weights) weights.push_back(real_array(w));
  j["model"] = {{"kind", to_string(m.kind)},
                {"classes", m.classes},
                {"weights", std::move(weights)},
                {"bias", real_array(m.bias)},
                {"converged", m.converged},
                {"vocab_fingerprint", to_hex(m.vocab_fingerprint)},
                {"config",
                 {{"c", format_double(m.config.c)},
                  {"tol", format_double(m.config.tol)},
                  {"max_iter", m.config.max_iter},
                  {"fit_bias", m.config.fit_bias},
                  {"seed", m.config.seed}}}};
  return j.dump() + "\n";
}

inline std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw FormatError("bundle: bad hex digest \"" + s + "\"");
  return std::stoull(s, nullptr, 16);
}

inline ModelBundle bundle_from_body(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bundle: malformed body: ") + e.what());
  }
  try {
    ModelBundle b;
    b.format_version = j.at("format_version").get<int>();
    if (b.format_version != kBundleFormatVersion)
      throw FormatError("bundle: unsupported format_version " + std::to_string(b.format_version));
    b.task = j.at("task").get<std::string>();
    b.corpus_fingerprint = parse_hex64(j.at("corpus_fingerprint").get<std::string>());
    const auto& tok = j.at("tokenizer");
    b.pipeline.tokenizer.lowercase = tok.at("lowercase").get<bool>();
    b.pipeline.tokenizer.ngram_min = tok.at("ngram_min").get<int>();
    b.pipeline.tokenizer.ngram_max = tok.at("ngram_max").get<int>();
    b.pipeline.tokenizer.validate();
    const auto& voc = j.at("vocabulary");
    b.pipeline.vocab = Vocabulary(voc.at("terms").get<std::vector<std::string>>(),
                                  voc.at("doc_freq").get<std::vector<std::uint64_t>>(),
                                  voc.at("n_docs").get<std::uint64_t>(), real_from(voc.at("max_df_ratio")),
                                  voc.at("min_df_count").get<std::uint64_t>());
    b.pipeline.tfidf.idf = reals_from(voc.at("idf"));
    const auto& m = j.at("model");
    b.model.kind = parse_model_kind(m.at("kind").get<std::string>());
    b.model.classes = m.at("classes").get<std::vector<std::string>>();
    for (const auto& w : m.at("weights")) b.model.weights.push_back(reals_from(w));
    b.model.bias = reals_from(m.at("bias"));
    b.model.converged = m.at("converged").get<bool>();
    b.model.vocab_fingerprint = parse_hex64(m.at("vocab_fingerprint").get<std::string>());
    const auto& cfg = m.at("config");
    b.model.config.c = real_from(cfg.at("c"));
    b.model.config.tol = real_from(cfg.at("tol"));
    b.model.config.max_iter = cfg.at("max_iter").get<int>();
    b.model.config.fit_bias = cfg.at("fit_bias").get<bool>();
    b.model.config.seed = cfg.at("seed").get<std::uint64_t>();
    b.validate();
    if (b.model.vocab_fingerprint != b.pipeline.vocab.fingerprint())
      throw FormatError("bundle: model was trained on a different vocabulary");
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bundle: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
}

}  // namespace detail

inline std::string serialize_bundle(const ModelBundle& b) {
  b.validate();
  const auto body = detail::bundle_body(b);
  return std::string(kBundleMagic) + " v" + std::to_string(b.format_version) + " " +
         detail::to_hex(detail::fnv1a(body)) + "\n" + body;
}

inline ModelBundle deserialize_bundle(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw FormatError("bundle: truncated header");
  std::istringstream header(bytes.substr(0, nl));
  std::string magic, version, digest, extra;
  header >> magic >> version >> digest;
  if (magic != kBundleMagic || version.size() < 2 || version[0] != 'v' || digest.empty() || (header >> extra))
    throw FormatError("bundle: not a model bundle (bad header)");
  int v = 0;
  try {
    v = std::stoi(version.substr(1));
  } catch (const std::exception&) {
    throw FormatError("bundle: bad version field \"" + version + "\"");
  }
  if (v != kBundleFormatVersion)
    throw FormatError("bundle: unsupported format version " + std::to_string(v) + " (this build reads v" +
                      std::to_string(kBundleFormatVersion) + ")");
  const auto body = bytes.substr(nl + 1);
  if (detail::parse_hex64(digest) != detail::fnv1a(body))
    throw FormatError("bundle: checksum mismatch (file corrupted or truncated)");
  return detail::bundle_from_body(body);
}

// Writes to a sibling temporary file, then renames over `path`.
inline void save_bundle(const ModelBundle& b, const std::string& path) {
  const auto bytes = serialize_bundle(b);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp, "cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError(tmp, "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path, "rename failed");
  }
}

inline ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open bundle");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_bundle(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace newsclf

#endif  // NEWSCLF_PERSIST_HPP_
