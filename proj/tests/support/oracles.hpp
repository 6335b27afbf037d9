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

#ifndef NEWSCLF_TESTS_SUPPORT_ORACLES_HPP_
#define NEWSCLF_TESTS_SUPPORT_ORACLES_HPP_

// Reference computations that share no code with the library paths they
// check: direct formula evaluation, brute-force search, exhaustive counting.

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace newsclf::testing {

// Minimizer of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct Grid2Result {
  double a1, a2, value;
};

// Maximizes a function over the box [0, c]^2 by repeatedly zooming a grid
// around the incumbent.
inline Grid2Result maximize_on_box(const std::function<double(double, double)>& f, double c, int points = 201,
                                   int rounds = 40) {
  double lo1 = 0, hi1 = c, lo2 = 0, hi2 = c;
  Grid2Result best{0, 0, f(0, 0)};
  for (int r = 0; r < rounds; ++r) {
    const double s1 = (hi1 - lo1) / (points - 1), s2 = (hi2 - lo2) / (points - 1);
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j) {
        const double a1 = lo1 + i * s1, a2 = lo2 + j * s2;
        const double v = f(a1, a2);
        if (v > best.value) best = {a1, a2, v};
      }
    lo1 = std::max(0.0, best.a1 - 4 * s1);
    hi1 = std::min(c, best.a1 + 4 * s1);
    lo2 = std::max(0.0, best.a2 - 4 * s2);
    hi2 = std::min(c, best.a2 + 4 * s2);
  }
  return best;
}

// Smooth-idf / L2 tf-idf rows from first principles, in long double.
// Returns, per document, term -> weight for the terms in `vocab`.
inline std::vector<std::map<std::string, long double>> tfidf_reference(
    const std::vector<std::vector<std::string>>& docs, const std::set<std::string>& vocab) {
  const long double n = static_cast<long double>(docs.size());
  std::map<std::string, long double> df;
  for (const auto& d : docs) {
    std::set<std::string> uniq(d.begin(), d.end());
    for (const auto& t : uniq)
      if (vocab.count(t)) df[t] += 1;
  }
  std::vector<std::map<std::string, long double>> rows;
  for (const auto& d : docs) {
    std::map<std::string, long double> row;
    for (const auto& t : d)
      if (vocab.count(t)) row[t] += 1;
    long double sq = 0;
    for (auto& [t, v] : row) {
      v *= std::log((1 + n) / (1 + df[t])) + 1;
      sq += v * v;
    }
    for (auto& [t, v] : row) v /= std::sqrt(sq);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace newsclf::testing

#endif  // NEWSCLF_TESTS_SUPPORT_ORACLES_HPP_
