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

#ifndef NEWSCLF_TESTS_SUPPORT_TOY_CORPUS_HPP_
#define NEWSCLF_TESTS_SUPPORT_TOY_CORPUS_HPP_

#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "newsclf/corpus.hpp"
#include "newsclf/features.hpp"

namespace newsclf::testing {

// Five short German news snippets.
inline Corpus toy_corpus() {
  const std::vector<std::pair<std::string, std::string>> texts = {
      {"Regierung plant Reform", "Die Regierung plant eine Reform der Steuern. Die Steuern steigen."},
      {"Reform gescheitert", "Die Reform der Regierung ist gescheitert, sagt die Opposition."},
      {"Katze wird Kanzlerin", "Eine Katze wird Kanzlerin. Die Regierung ist begeistert."},
      {"Steuern sinken", "Die Steuern sinken im Jahr 2018 deutlich."},
      {"Opposition jubelt", "Die Opposition jubelt: die Katze regiert jetzt."},
  };
  Corpus c;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Article a;
    a.id = std::to_string(i);
    a.title = texts[i].first;
    a.body = texts[i].second;
    c.push_back(a);
  }
  return c;
}

// ASCII-only tokenizer written independently of the library one.
inline TermList ascii_ngrams(const std::string& text) {
  TermList toks;
  std::string cur;
  for (char ch : text + " ") {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else {
      if (cur.size() >= 2) toks.push_back(cur);
      cur.clear();
    }
  }
  TermList out = toks;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) out.push_back(toks[i] + " " + toks[i + 1]);
  return out;
}

}  // namespace newsclf::testing

#endif  // NEWSCLF_TESTS_SUPPORT_TOY_CORPUS_HPP_
