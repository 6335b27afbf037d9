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

#ifndef NEWSCLF_CORPUS_HPP_
#define NEWSCLF_CORPUS_HPP_

// Article data model, JSONL corpus I/O, cleaning and deterministic
// train/test partitioning.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "newsclf/detail/hash.hpp"
#include "newsclf/detail/numfmt.hpp"
#include "newsclf/detail/random.hpp"
#include "newsclf/detail/utf8.hpp"
#include "newsclf/error.hpp"

namespace newsclf {

struct Article {
  std::string id;
  std::string url;
  std::string title;
  std::string body;
  std::string category;
  std::string date;  // ISO-8601 (YYYY-MM-DD) once cleaned
  std::string publisher;
  bool satire = false;
  std::optional<bool> paid;

  friend bool operator==(const Article&, const Article&) = default;
};

using Corpus = std::vector<Article>;

// ---------------------------------------------------------------------------
// Labels

enum class LabelField { satire, paid, publisher };

inline std::string_view to_string(LabelField f) {
  switch (f) {
    case LabelField::satire: return "satire";
    case LabelField::paid: return "paid";
    case LabelField::publisher: return "publisher";
  }
  return "?";
}

inline LabelField parse_label_field(std::string_view s) {
  if (s == "satire") return LabelField::satire;
  if (s == "paid") return LabelField::paid;
  if (s == "publisher") return LabelField::publisher;
  throw InvalidArgument("unknown label field '" + std::string(s) + "'");
}

inline constexpr std::string_view kSatireLabel = "satire";
inline constexpr std::string_view kRegularLabel = "regular";
inline constexpr std::string_view kPaidLabel = "paid";
inline constexpr std::string_view kEditorialLabel = "editorial";

// Class label of `a` for the given task. Binary tasks use the names above so
// that the negative class sorts first.
inline std::string label_of(const Article& a, LabelField field) {
  switch (field) {
    case LabelField::satire:
      return std::string(a.satire ? kSatireLabel : kRegularLabel);
    case LabelField::paid:
      if (!a.paid) throw InvalidArgument("article " + a.id + " has no paid label");
      return std::string(*a.paid ? kPaidLabel : kEditorialLabel);
    case LabelField::publisher:
      return a.publisher;
  }
  return {};
}

inline std::vector<std::string> labels_of(const Corpus& corpus, LabelField field) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& a : corpus) out.push_back(label_of(a, field));
  return out;
}

// ---------------------------------------------------------------------------
// JSONL I/O

struct LoadError {
  std::size_t line;
  std::string message;
};

struct LoadResult {
  Corpus articles;
  std::vector<std::size_t> lines;  // source line of each article
  std::vector<LoadError> errors;
};

enum class Schema {
  full,       // every field required
  text_only,  // title and body required, the rest optional (prediction input)
};

namespace detail {

inline std::string require_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing required field \"") + key + "\"");
  if (!it->is_string()) throw std::invalid_argument(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

inline std::string optional_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw std::invalid_argument(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

inline Article article_from_json(const nlohmann::json& obj, std::size_t line, Schema schema) {
  if (!obj.is_object()) throw std::invalid_argument("record is not a JSON object");
  Article a;
  if (auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
    if (it->is_string()) {
      a.id = it->get<std::string>();
    } else if (it->is_number_integer()) {
      a.id = std::to_string(it->get<long long>());
    } else {
      throw std::invalid_argument("field \"id\" must be a string or integer");
    }
    if (a.id.empty()) throw std::invalid_argument("field \"id\" is empty");
  } else {
    a.id = std::to_string(line);
  }
  a.title = require_string(obj, "title");
  a.body = require_string(obj, "body");
  if (schema == Schema::text_only) {
    a.url = optional_string(obj, "url");
    a.category = optional_string(obj, "category");
    a.date = optional_string(obj, "date");
    a.publisher = optional_string(obj, "publisher");
    if (auto it = obj.find("satire"); it != obj.end() && it->is_boolean()) a.satire = it->get<bool>();
    return a;
  }
  a.url = require_string(obj, "url");
  a.category = require_string(obj, "category");
  a.date = require_string(obj, "date");
  a.publisher = require_string(obj, "publisher");
  auto sat = obj.find("satire");
  if (sat == obj.end()) throw std::invalid_argument("missing required field \"satire\"");
  if (!sat->is_boolean()) throw std::invalid_argument("field \"satire\" must be a boolean");
  a.satire = sat->get<bool>();
  if (auto it = obj.find("paid"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) throw std::invalid_argument("field \"paid\" must be a boolean or null");
    a.paid = it->get<bool>();
  }
  return a;
}

}  // namespace detail

inline nlohmann::json to_json(const Article& a) {
  nlohmann::json j;
  j["id"] = a.id;
  j["url"] = a.url;
  j["title"] = a.title;
  j["body"] = a.body;
  j["category"] = a.category;
  j["date"] = a.date;
  j["publisher"] = a.publisher;
  j["satire"] = a.satire;
  j["paid"] = a.paid ? nlohmann::json(*a.paid) : nlohmann::json(nullptr);
  return j;
}

// Reads one record per line. Blank lines are skipped but still counted.
// Bad records are collected in `errors` and left out of `articles`.
inline LoadResult load_corpus(std::istream& in, Schema schema = Schema::full) {
  LoadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      Article a = detail::article_from_json(obj, lineno, schema);
      if (!seen.insert(a.id).second) {
        result.errors.push_back({lineno, "duplicate id \"" + a.id + "\""});
        continue;
      }
      result.articles.push_back(std::move(a));
      result.lines.push_back(lineno);
    } catch (const nlohmann::json::exception& e) {
      result.errors.push_back({lineno, std::string("invalid JSON: ") + e.what()});
    } catch (const std::invalid_argument& e) {
      result.errors.push_back({lineno, e.what()});
    }
  }
  return result;
}

inline LoadResult load_corpus(const std::string& path, Schema schema = Schema::full) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open corpus file");
  return load_corpus(in, schema);
}

// Like load_corpus but the first bad record is fatal.
inline Corpus load_corpus_strict(const std::string& path) {
  auto r = load_corpus(path);
  if (!r.errors.empty()) throw RecordError(r.errors.front().line, r.errors.front().message);
  return std::move(r.articles);
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& a : corpus) out << to_json(a).dump() << '\n';
}

inline void write_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  write_corpus(out, corpus);
  if (!out) throw IoError(path, "write failed");
}

// Digest over ids, texts and labels, in order.
inline std::uint64_t corpus_fingerprint(const Corpus& corpus) {
  detail::Fnv1a h;
  for (const auto& a : corpus) {
    h.field(a.id).field(a.url).field(a.title).field(a.body).field(a.category);
    h.field(a.date).field(a.publisher).field(a.satire ? "1" : "0");
    h.field(a.paid ? (*a.paid ? "1" : "0") : "-");
  }
  return h.digest();
}

// ---------------------------------------------------------------------------
// Cleaning

class StripPattern {
 public:
  enum class Kind { literal, regex };

  static StripPattern literal(std::string text) { return StripPattern(Kind::literal, std::move(text)); }
  static StripPattern regex(std::string text) { return StripPattern(Kind::regex, std::move(text)); }

  Kind kind() const noexcept { return kind_; }
  const std::string& text() const noexcept { return text_; }

  // Removes every occurrence, scanning left to right.
  std::string remove_from(const std::string& s) const {
    if (kind_ == Kind::regex) return std::regex_replace(s, *re_, "");
    if (text_.empty()) return s;
    std::string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    for (;;) {
      auto hit = s.find(text_, pos);
      if (hit == std::string::npos) break;
      out.append(s, pos, hit - pos);
      pos = hit + text_.size();
    }
    out.append(s, pos, std::string::npos);
    return out;
  }

 private:
  StripPattern(Kind kind, std::string text) : kind_(kind), text_(std::move(text)) {
    if (kind_ == Kind::regex) {
      try {
        re_ = std::make_shared<const std::regex>(text_, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw InvalidArgument("bad strip pattern /" + text_ + "/: " + e.what());
      }
    }
  }

  Kind kind_;
  std::string text_;
  std::shared_ptr<const std::regex> re_;
};

// Pattern file: one pattern per line, '#' starts a comment line, blank
// lines are ignored. A "re:" prefix marks an ECMAScript regular expression,
// "lit:" forces a literal; anything else is literal.
inline std::vector<StripPattern> parse_strip_patterns(std::istream& in) {
  std::vector<StripPattern> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!detail::is_valid_utf8(line)) throw RecordError(lineno, "pattern is not valid UTF-8");
    try {
      if (line.rfind("re:", 0) == 0) {
        out.push_back(StripPattern::regex(line.substr(3)));
      } else if (line.rfind("lit:", 0) == 0) {
        out.push_back(StripPattern::literal(line.substr(4)));
      } else {
        out.push_back(StripPattern::literal(line));
      }
    } catch (const InvalidArgument& e) {
      throw RecordError(lineno, e.what());
    }
  }
  return out;
}

inline std::vector<StripPattern> load_strip_patterns(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open pattern file");
  return parse_strip_patterns(in);
}

struct CleaningConfig {
  std::size_t min_body_chars = 500;
  std::size_t max_body_chars = 10000;
  std::vector<StripPattern> strip_patterns;
  // Tried after ISO-8601. Directives: %Y %m %d %H %M %S %%.
  std::vector<std::string> date_formats = {"%d.%m.%Y", "%d.%m.%Y %H:%M", "%d.%m.%Y %H:%M:%S", "%Y/%m/%d"};

  void validate() const {
    if (min_body_chars == 0 || min_body_chars > max_body_chars)
      throw InvalidArgument("cleaning bounds must satisfy 0 < min_body_chars <= max_body_chars");
  }
};

class DateError : public Error {
 public:
  explicit DateError(std::string raw, const std::string& why)
      : Error("unparseable date \"" + raw + "\"" + (why.empty() ? "" : ": " + why)), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, int min_digits, int max_digits, int& value) {
  int n = 0;
  value = 0;
  while (n < max_digits && pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
    value = value * 10 + (s[pos] - '0');
    ++pos;
    ++n;
  }
  return n >= min_digits;
}

inline std::optional<std::chrono::year_month_day> valid_ymd(int y, int m, int d) {
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

inline bool valid_time(int h, int mi, int s) { return h >= 0 && h < 24 && mi >= 0 && mi < 60 && s >= 0 && s <= 60; }

// Matches the whole of `s` against a strptime-like format.
inline std::optional<std::chrono::year_month_day> match_date_format(std::string_view s, std::string_view fmt) {
  int y = -1, m = -1, d = -1, h = 0, mi = 0, sec = 0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      if (pos >= s.size() || s[pos] != fmt[i]) return std::nullopt;
      ++pos;
      continue;
    }
    if (++i >= fmt.size()) return std::nullopt;
    bool ok = true;
    switch (fmt[i]) {
      case 'Y': ok = read_digits(s, pos, 4, 4, y); break;
      case 'm': ok = read_digits(s, pos, 1, 2, m); break;
      case 'd': ok = read_digits(s, pos, 1, 2, d); break;
      case 'H': ok = read_digits(s, pos, 1, 2, h); break;
      case 'M': ok = read_digits(s, pos, 1, 2, mi); break;
      case 'S': ok = read_digits(s, pos, 1, 2, sec); break;
      case '%': ok = pos < s.size() && s[pos++] == '%'; break;
      default: return std::nullopt;
    }
    if (!ok) return std::nullopt;
  }
  if (pos != s.size() || y < 0 || m < 0 || d < 0 || !valid_time(h, mi, sec)) return std::nullopt;
  return valid_ymd(y, m, d);
}

// YYYY-MM-DD, optionally followed by a 'T' or ' ' time part which is dropped.
inline std::optional<std::chrono::year_month_day> match_iso8601(std::string_view s) {
  if (s.size() < 10) return std::nullopt;
  static const std::regex iso(R"(^(\d{4})-(\d{2})-(\d{2})([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(s.begin(), s.end(), m, iso)) return std::nullopt;
  if (m[4].matched) {
    auto t = m[4].str();
    int h = std::stoi(t.substr(1, 2)), mi = std::stoi(t.substr(4, 2));
    int sec = t.size() >= 9 && t[6] == ':' ? std::stoi(t.substr(7, 2)) : 0;
    if (!valid_time(h, mi, sec)) return std::nullopt;
  }
  return valid_ymd(std::stoi(m[1].str()), std::stoi(m[2].str()), std::stoi(m[3].str()));
}

inline std::string format_ymd(const std::chrono::year_month_day& ymd) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace detail

// First matching format wins; a later format that also matches but yields a
// different calendar date makes the input ambiguous and it is rejected.
inline std::string normalize_date(const std::string& raw, const std::vector<std::string>& formats) {
  std::string_view s = raw;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (auto iso = detail::match_iso8601(s)) return detail::format_ymd(*iso);
  std::optional<std::chrono::year_month_day> found;
  for (const auto& f : formats) {
    auto ymd = detail::match_date_format(s, f);
    if (!ymd) continue;
    if (!found) {
      found = ymd;
    } else if (*found != *ymd) {
      throw DateError(raw, "ambiguous between configured formats");
    }
  }
  if (!found) throw DateError(raw, "");
  return detail::format_ymd(*found);
}

enum class DropReason { none, too_short, too_long };

struct CleanResult {
  std::optional<Article> article;
  DropReason reason = DropReason::none;
  std::size_t body_chars = 0;
};

inline std::string apply_strip_patterns(std::string s, const std::vector<StripPattern>& patterns) {
  if (patterns.empty()) return s;
  // Repeat to a fixpoint so removal cannot expose a fresh match later.
  for (;;) {
    std::string next = s;
    for (const auto& p : patterns) next = p.remove_from(next);
    if (next == s) return s;
    s = std::move(next);
  }
}

// Strips boilerplate, normalizes the date and applies the length bounds
// (inclusive, in Unicode scalar values of the stripped body).
inline CleanResult clean_article_detailed(const Article& a, const CleaningConfig& cfg) {
  CleanResult r;
  Article out = a;
  out.date = normalize_date(a.date, cfg.date_formats);
  out.title = apply_strip_patterns(a.title, cfg.strip_patterns);
  out.body = apply_strip_patterns(a.body, cfg.strip_patterns);
  auto len = detail::utf8_length(out.body);
  if (!len) throw InvalidArgument("article " + a.id + ": body is not valid UTF-8");
  r.body_chars = *len;
  if (*len < cfg.min_body_chars) {
    r.reason = DropReason::too_short;
  } else if (*len > cfg.max_body_chars) {
    r.reason = DropReason::too_long;
  } else {
    r.article = std::move(out);
  }
  return r;
}

inline std::optional<Article> clean_article(const Article& a, const CleaningConfig& cfg) {
  return clean_article_detailed(a, cfg).article;
}

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_publisher;
  std::map<std::string, std::size_t> per_label;  // satire / regular
  std::map<std::string, std::size_t> per_paid;   // paid / editorial / unknown
  std::size_t bin_width = 1000;
  std::vector<std::size_t> length_histogram;  // bin i = [i*w, (i+1)*w)
};

inline CorpusStats corpus_stats(const Corpus& corpus, std::size_t bin_width = 1000) {
  CorpusStats s;
  s.bin_width = bin_width == 0 ? 1 : bin_width;
  s.total = corpus.size();
  s.per_label[std::string(kSatireLabel)] = 0;
  s.per_label[std::string(kRegularLabel)] = 0;
  for (const auto& a : corpus) {
    ++s.per_publisher[a.publisher];
    ++s.per_label[label_of(a, LabelField::satire)];
    ++s.per_paid[a.paid ? label_of(a, LabelField::paid) : std::string("unknown")];
    const std::size_t chars = detail::utf8_length(a.body).value_or(a.body.size());
    const std::size_t bin = chars / s.bin_width;
    if (s.length_histogram.size() <= bin) s.length_histogram.resize(bin + 1, 0);
    ++s.length_histogram[bin];
  }
  return s;
}

inline nlohmann::json to_json(const CorpusStats& s) {
  nlohmann::json j;
  j["total"] = s.total;
  j["per_publisher"] = s.per_publisher;
  j["per_label"] = s.per_label;
  j["per_paid"] = s.per_paid;
  j["length_bin_width"] = s.bin_width;
  j["length_histogram"] = s.length_histogram;
  return j;
}

// ---------------------------------------------------------------------------
// Partitioning

enum class SplitKind { random, stratified_random, publisher_holdout, kfold };

inline std::string_view to_string(SplitKind k) {
  switch (k) {
    case SplitKind::random: return "random";
    case SplitKind::stratified_random: return "stratified_random";
    case SplitKind::publisher_holdout: return "publisher_holdout";
    case SplitKind::kfold: return "kfold";
  }
  return "?";
}

inline SplitKind parse_split_kind(std::string_view s) {
  if (s == "random") return SplitKind::random;
  if (s == "stratified_random") return SplitKind::stratified_random;
  if (s == "publisher_holdout") return SplitKind::publisher_holdout;
  if (s == "kfold") return SplitKind::kfold;
  throw InvalidArgument("unknown split kind '" + std::string(s) + "'");
}

struct SplitSpec {
  SplitKind kind = SplitKind::random;
  std::optional<double> test_fraction;
  std::uint64_t seed = 42;
  std::vector<std::string> holdout_publishers;  // sorted, unique
  std::optional<int> folds;
  LabelField label_field = LabelField::satire;

  static SplitSpec random(double fraction, std::uint64_t seed, LabelField label = LabelField::satire) {
    return {SplitKind::random, fraction, seed, {}, std::nullopt, label};
  }
  static SplitSpec stratified(double fraction, std::uint64_t seed, LabelField label = LabelField::satire) {
    return {SplitKind::stratified_random, fraction, seed, {}, std::nullopt, label};
  }
  static SplitSpec holdout(std::vector<std::string> publishers, LabelField label = LabelField::satire) {
    std::sort(publishers.begin(), publishers.end());
    publishers.erase(std::unique(publishers.begin(), publishers.end()), publishers.end());
    return {SplitKind::publisher_holdout, std::nullopt, 0, std::move(publishers), std::nullopt, label};
  }
  static SplitSpec kfold(int folds, std::uint64_t seed, LabelField label = LabelField::satire) {
    return {SplitKind::kfold, std::nullopt, seed, {}, folds, label};
  }

  void validate() const {
    const bool random_kind = kind == SplitKind::random || kind == SplitKind::stratified_random;
    if (random_kind != test_fraction.has_value())
      throw InvalidArgument("test_fraction must be set exactly for random split kinds");
    if (test_fraction && !(*test_fraction > 0.0 && *test_fraction < 1.0))
      throw InvalidArgument("test_fraction must lie in (0, 1)");
    if ((kind == SplitKind::publisher_holdout) == holdout_publishers.empty())
      throw InvalidArgument("holdout_publishers must be nonempty exactly for publisher_holdout");
    if ((kind == SplitKind::kfold) != folds.has_value())
      throw InvalidArgument("folds must be set exactly for kfold");
    if (folds && *folds < 2) throw InvalidArgument("folds must be >= 2");
  }

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

inline nlohmann::json to_json(const SplitSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["seed"] = s.seed;
  j["label_field"] = to_string(s.label_field);
  if (s.test_fraction) j["test_fraction"] = *s.test_fraction;
  if (!s.holdout_publishers.empty()) j["holdout_publishers"] = s.holdout_publishers;
  if (s.folds) j["folds"] = *s.folds;
  return j;
}

inline SplitSpec split_spec_from_json(const nlohmann::json& j) {
  SplitSpec s;
  s.kind = parse_split_kind(j.at("kind").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.label_field = parse_label_field(j.at("label_field").get<std::string>());
  if (j.contains("test_fraction")) s.test_fraction = j["test_fraction"].get<double>();
  if (j.contains("holdout_publishers")) s.holdout_publishers = j["holdout_publishers"].get<std::vector<std::string>>();
  if (j.contains("folds")) s.folds = j["folds"].get<int>();
  s.validate();
  return s;
}

struct Partition {
  std::vector<std::string> train_ids;  // corpus order
  std::vector<std::string> test_ids;   // corpus order
  SplitSpec spec;
  std::optional<int> fold;

  friend bool operator==(const Partition&, const Partition&) = default;
};

inline nlohmann::json to_json(const Partition& p) {
  nlohmann::json j;
  j["spec"] = to_json(p.spec);
  if (p.fold) j["fold"] = *p.fold;
  j["train_ids"] = p.train_ids;
  j["test_ids"] = p.test_ids;
  return j;
}

inline Partition partition_from_json(const nlohmann::json& j) {
  Partition p;
  p.spec = split_spec_from_json(j.at("spec"));
  if (j.contains("fold")) p.fold = j["fold"].get<int>();
  p.train_ids = j.at("train_ids").get<std::vector<std::string>>();
  p.test_ids = j.at("test_ids").get<std::vector<std::string>>();
  return p;
}

namespace detail {

inline std::vector<std::string> sorted_ids(const std::vector<const Article*>& docs) {
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (const auto* a : docs) ids.push_back(a->id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline Partition split_by_membership(const Corpus& corpus, const std::unordered_set<std::string>& test,
                                     const SplitSpec& spec) {
  Partition p;
  p.spec = spec;
  for (const auto& a : corpus) (test.count(a.id) ? p.test_ids : p.train_ids).push_back(a.id);
  return p;
}

inline std::size_t random_test_size(std::size_t n, double fraction) {
  const auto k = round_half_away(static_cast<double>(n) * fraction);
  if (k <= 0 || static_cast<std::size_t>(k) >= n)
    throw InvalidArgument("test_fraction " + format_double(fraction) + " on " + std::to_string(n) +
                          " documents leaves an empty train or test set");
  return static_cast<std::size_t>(k);
}

// Documents grouped by label, classes in lexicographic order.
inline std::map<std::string, std::vector<const Article*>> group_by_label(const Corpus& corpus, LabelField field) {
  std::map<std::string, std::vector<const Article*>> groups;
  for (const auto& a : corpus) groups[label_of(a, field)].push_back(&a);
  return groups;
}

// Largest-remainder apportionment of `total` over `sizes`; ties go to the
// earlier entry.
inline std::vector<std::size_t> apportion(const std::vector<std::size_t>& sizes, std::size_t total) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  std::vector<std::size_t> quota(sizes.size());
  std::vector<std::pair<std::uint64_t, std::size_t>> rem;  // remainder numerator, index
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto num = static_cast<std::uint64_t>(sizes[i]) * total;
    quota[i] = static_cast<std::size_t>(num / n);
    assigned += quota[i];
    rem.emplace_back(num % n, i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++quota[rem[r].second];
  return quota;
}

}  // namespace detail

// Single train/test split. Membership depends only on the set of ids and
// `spec`; both id lists come back in corpus order.
inline Partition make_partition(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (corpus.empty()) throw InvalidArgument("cannot partition an empty corpus");
  std::unordered_set<std::string> test;
  switch (spec.kind) {
    case SplitKind::random: {
      std::vector<const Article*> all;
      for (const auto& a : corpus) all.push_back(&a);
      auto ids = detail::sorted_ids(all);
      const auto k = detail::random_test_size(ids.size(), *spec.test_fraction);
      detail::Rng rng(spec.seed);
      detail::fisher_yates(ids, rng);
      test.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    }
    case SplitKind::stratified_random: {
      const auto k = detail::random_test_size(corpus.size(), *spec.test_fraction);
      auto groups = detail::group_by_label(corpus, spec.label_field);
      std::vector<std::size_t> sizes;
      for (const auto& [label, docs] : groups) sizes.push_back(docs.size());
      const auto quota = detail::apportion(sizes, k);
      detail::Rng rng(spec.seed);
      std::size_t gi = 0;
      for (const auto& [label, docs] : groups) {
        auto ids = detail::sorted_ids(docs);
        detail::fisher_yates(ids, rng);
        test.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(quota[gi++]));
      }
      break;
    }
    case SplitKind::publisher_holdout: {
      std::set<std::string> present;
      for (const auto& a : corpus) present.insert(a.publisher);
      for (const auto& p : spec.holdout_publishers)
        if (!present.count(p)) throw InvalidArgument("holdout publisher '" + p + "' does not occur in the corpus");
      const std::set<std::string> held(spec.holdout_publishers.begin(), spec.holdout_publishers.end());
      for (const auto& a : corpus)
        if (held.count(a.publisher)) test.insert(a.id);
      if (test.size() == corpus.size()) throw InvalidArgument("publisher holdout leaves no training documents");
      break;
    }
    case SplitKind::kfold:
      throw InvalidArgument("kfold specs produce several partitions; use make_folds");
  }
  return detail::split_by_membership(corpus, test, spec);
}

// Stratified k-fold: within each class (lexicographic order) ids are sorted,
// shuffled, concatenated and dealt round-robin, so fold sizes differ by at
// most one overall.
inline std::vector<Partition> make_folds(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (spec.kind != SplitKind::kfold) throw InvalidArgument("make_folds requires a kfold spec");
  const auto k = static_cast<std::size_t>(*spec.folds);
  if (corpus.size() < k) throw InvalidArgument("fewer documents than folds");
  auto groups = detail::group_by_label(corpus, spec.label_field);
  detail::Rng rng(spec.seed);
  std::unordered_map<std::string, std::size_t> fold_of;
  std::size_t pos = 0;
  for (const auto& [label, docs] : groups) {
    auto ids = detail::sorted_ids(docs);
    detail::fisher_yates(ids, rng);
    for (auto& id : ids) fold_of.emplace(std::move(id), pos++ % k);
  }
  std::vector<Partition> out(k);
  for (std::size_t f = 0; f < k; ++f) {
    out[f].spec = spec;
    out[f].fold = static_cast<int>(f);
  }
  for (const auto& a : corpus) {
    const auto f = fold_of.at(a.id);
    for (std::size_t g = 0; g < k; ++g) (g == f ? out[g].test_ids : out[g].train_ids).push_back(a.id);
  }
  return out;
}

// Articles with the given ids, in the order of `ids`.
inline Corpus select(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::unordered_map<std::string_view, const Article*> by_id;
  by_id.reserve(corpus.size());
  for (const auto& a : corpus) by_id.emplace(a.id, &a);
  Corpus out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InvalidArgument("id '" + id + "' is not in the corpus");
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace newsclf

#endif  // NEWSCLF_CORPUS_HPP_
