// Copyright 2026 The ofclip Authors.
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

// Test-only reference implementations. Nothing here calls into the library's
// loss, ranking or metric code; they share only the Mat container.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "ofclip/linalg.hpp"
#include "ofclip/rng.hpp"

namespace oracle {

using ofclip::Mat;

inline Mat random_mat(std::size_t r, std::size_t c, ofclip::SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (double& x : m.data()) x = rng.uniform(lo, hi);
  return m;
}

inline Mat random_unit_rows(std::size_t r, std::size_t c, ofclip::SplitMix64& rng) {
  Mat m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    double n2 = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      m(i, j) = rng.normal();
      n2 += m(i, j) * m(i, j);
    }
    for (std::size_t j = 0; j < c; ++j) m(i, j) /= std::sqrt(n2);
  }
  return m;
}

/// Direct transcription of the two directional terms with long double sums.
inline double naive_contrastive_total(const Mat& u, const Mat& v, double tau) {
  const std::size_t n = u.rows();
  auto sim = [&](const Mat& a, std::size_t i, const Mat& b, std::size_t j) {
    long double s = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(j, k);
    return static_cast<long double>(tau) * s;
  };
  auto direction = [&](const Mat& a, const Mat& b) {
    long double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      long double denom = 0;
      for (std::size_t j = 0; j < n; ++j) denom += std::exp(sim(a, i, b, j));
      total += -std::log(std::exp(sim(a, i, b, i)) / denom);
    }
    return static_cast<double>(total / n);
  };
  return direction(u, v) + direction(v, u);
}

/// Central difference of f at x[i] with step h.
inline double central_difference(const std::function<double()>& f, double& x, double h) {
  const double saved = x;
  x = saved + h;
  const double fp = f();
  x = saved - h;
  const double fm = f();
  x = saved;
  return (fp - fm) / (2.0 * h);
}

inline double relative_error(double a, double f) {
  return std::abs(a - f) / std::max(1e-8, std::abs(a) + std::abs(f));
}

/// Sorted candidate indices by descending score, ties by index, via a full
/// comparison sort over (score, index) pairs.
inline std::vector<std::size_t> full_sort(const std::vector<double>& scores) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < scores.size(); ++i) keyed.emplace_back(-scores[i], i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> out;
  for (const auto& [s, i] : keyed) out.push_back(i);
  return out;
}

inline std::vector<double> scores_against(const Mat& q, std::size_t row, const Mat& g) {
  std::vector<double> s(g.rows(), 0.0);
  for (std::size_t j = 0; j < g.rows(); ++j)
    for (std::size_t k = 0; k < g.cols(); ++k) s[j] += q(row, k) * g(j, k);
  return s;
}

inline double accuracy_at_k(const std::vector<std::vector<std::size_t>>& rankings,
                            const std::vector<std::size_t>& truth, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    for (std::size_t r = 0; r < rankings[q].size() && r < k; ++r) {
      if (rankings[q][r] == truth[q]) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

/// Confusion-matrix weighted F1.
inline double weighted_f1(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                          std::size_t classes) {
  std::vector<std::vector<double>> cm(classes, std::vector<double>(classes, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) cm[truth[i]][predicted[i]] += 1.0;
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    double row = 0.0, col = 0.0;
    for (std::size_t o = 0; o < classes; ++o) {
      row += cm[c][o];
      col += cm[o][c];
    }
    if (row == 0.0) continue;
    const double p = col > 0 ? cm[c][c] / col : 0.0;
    const double r = cm[c][c] / row;
    const double f1 = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
    num += row * f1;
    den += row;
  }
  return num / den;
}

inline double macro_f1(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                       std::size_t classes) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predicted[i] == c && truth[i] == c) tp += 1;
      if (predicted[i] == c && truth[i] != c) fp += 1;
      if (predicted[i] != c && truth[i] == c) fn += 1;
    }
    if (tp + fn == 0) continue;
    sum += tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    ++n;
  }
  return sum / static_cast<double>(n);
}

struct RecallPair {
  double overall;
  double per_class;
};

inline RecallPair multilabel_recall(const std::vector<std::vector<std::size_t>>& rankings,
                                    const std::vector<std::set<std::size_t>>& truth, std::size_t k,
                                    std::size_t attributes) {
  double hits = 0, relevant = 0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    for (auto a : truth[q]) {
      relevant += 1;
      for (std::size_t r = 0; r < k && r < rankings[q].size(); ++r)
        if (rankings[q][r] == a) hits += 1;
    }
  }
  double sum = 0;
  std::size_t classes = 0;
  for (std::size_t a = 0; a < attributes; ++a) {
    double pos = 0, got = 0;
    for (std::size_t q = 0; q < rankings.size(); ++q) {
      if (!truth[q].count(a)) continue;
      pos += 1;
      for (std::size_t r = 0; r < k && r < rankings[q].size(); ++r)
        if (rankings[q][r] == a) got += 1;
    }
    if (pos == 0) continue;
    sum += got / pos;
    ++classes;
  }
  return {hits / relevant, sum / static_cast<double>(classes)};
}

inline double retrieval_recall(const Mat& queries, const Mat& gallery,
                               const std::vector<std::set<std::size_t>>& relevance, std::size_t k) {
  double hits = 0;
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto order = full_sort(scores_against(queries, q, gallery));
    bool found = false;
    for (std::size_t r = 0; r < k && r < order.size(); ++r) found = found || relevance[q].count(order[r]) > 0;
    hits += found ? 1 : 0;
  }
  return hits / static_cast<double>(queries.rows());
}

}  // namespace oracle
