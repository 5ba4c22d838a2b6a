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

// Zero-shot ranking and the classification / attribute / retrieval metrics.
// Every ranking orders by descending score with ties going to the lower index.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ofclip/linalg.hpp"

namespace ofclip {

struct RankedPrediction {
  std::size_t query = 0;
  std::vector<std::size_t> ranked;  // class or gallery indices, best first
  std::vector<double> scores;       // matching similarities, non-increasing
};

/// Full ranking of `candidates` rows by dot product with `query`.
inline RankedPrediction rank_by_similarity(std::span<const double> query, const Mat& candidates,
                                           std::size_t query_index = 0) {
  if (query.size() != candidates.cols()) {
    fail(ErrorCode::DimMismatch, "query width " + std::to_string(query.size()) + " vs candidates " +
                                     std::to_string(candidates.cols()));
  }
  std::vector<double> sims(candidates.rows());
  for (std::size_t c = 0; c < candidates.rows(); ++c) sims[c] = dot(query, candidates.row(c));
  RankedPrediction p;
  p.query = query_index;
  p.ranked.resize(candidates.rows());
  std::iota(p.ranked.begin(), p.ranked.end(), std::size_t{0});
  std::stable_sort(p.ranked.begin(), p.ranked.end(),
                   [&](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });
  p.scores.reserve(sims.size());
  for (auto i : p.ranked) p.scores.push_back(sims[i]);
  return p;
}

inline RankedPrediction zero_shot_rank(std::span<const double> image_embedding, const Mat& class_embeddings,
                                       std::size_t query_index = 0) {
  return rank_by_similarity(image_embedding, class_embeddings, query_index);
}

inline std::vector<RankedPrediction> zero_shot_rank_all(const Mat& images, const Mat& class_embeddings) {
  std::vector<RankedPrediction> out;
  out.reserve(images.rows());
  for (std::size_t i = 0; i < images.rows(); ++i) out.push_back(zero_shot_rank(images.row(i), class_embeddings, i));
  return out;
}

namespace detail {

inline std::size_t truth_for(std::span<const std::size_t> truth, std::size_t query) {
  if (query >= truth.size()) fail(ErrorCode::MissingTruth, "no truth label for query " + std::to_string(query));
  return truth[query];
}

}  // namespace detail

/// Fraction of queries whose truth class is within the first min(k, classes)
/// ranked entries. truth[q] is the class index of query q.
inline double accuracy_at_k(std::span<const RankedPrediction> preds, std::span<const std::size_t> truth,
                            std::size_t k) {
  if (k == 0) fail(ErrorCode::ConfigError, "k must be >= 1");
  if (preds.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& p : preds) {
    const std::size_t t = detail::truth_for(truth, p.query);
    const auto end = p.ranked.begin() + static_cast<std::ptrdiff_t>(std::min(k, p.ranked.size()));
    if (std::find(p.ranked.begin(), end, t) != end) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

/// Support-weighted mean of per-class F1 over top-1 predictions. Classes with
/// no true samples carry zero weight; P = R = 0 gives F1 = 0.
inline double weighted_f1(std::span<const RankedPrediction> preds, std::span<const std::size_t> truth) {
  if (preds.empty()) fail(ErrorCode::MissingTruth, "weighted F1 needs at least one query");
  std::map<std::size_t, std::size_t> support, predicted, correct;
  for (const auto& p : preds) {
    const std::size_t t = detail::truth_for(truth, p.query);
    if (p.ranked.empty()) fail(ErrorCode::DimMismatch, "empty ranking");
    const std::size_t y = p.ranked.front();
    ++support[t];
    ++predicted[y];
    if (y == t) ++correct[t];
  }
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& [cls, n_true] : support) {
    const double tp = static_cast<double>(correct[cls]);
    const double n_pred = static_cast<double>(predicted[cls]);
    const double precision = n_pred > 0 ? tp / n_pred : 0.0;
    const double recall = tp / static_cast<double>(n_true);
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    weighted += static_cast<double>(n_true) * f1;
    total += static_cast<double>(n_true);
  }
  return weighted / total;
}

struct MultilabelRecall {
  double overall = 0.0;
  double per_class_mean = 0.0;
  std::size_t evaluated_queries = 0;
  std::size_t excluded_queries = 0;  // empty truth sets
  std::size_t evaluated_classes = 0; // attributes with >= 1 positive
};

/// overall = sum_q |topk(q) & truth(q)| / sum_q |truth(q)|;
/// per_class_mean averages, over attributes with at least one positive query,
/// the fraction of those positives whose top-k contains the attribute.
inline MultilabelRecall multilabel_recall_at_k(std::span<const RankedPrediction> preds,
                                               std::span<const std::set<std::size_t>> truth, std::size_t k) {
  if (k == 0) fail(ErrorCode::ConfigError, "k must be >= 1");
  MultilabelRecall out;
  std::size_t hit_total = 0, relevant_total = 0;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_class;  // hits, positives
  for (const auto& p : preds) {
    if (p.query >= truth.size()) fail(ErrorCode::MissingTruth, "no truth set for query " + std::to_string(p.query));
    const auto& t = truth[p.query];
    if (t.empty()) {
      ++out.excluded_queries;
      continue;
    }
    ++out.evaluated_queries;
    const std::size_t depth = std::min(k, p.ranked.size());
    const std::set<std::size_t> top(p.ranked.begin(), p.ranked.begin() + static_cast<std::ptrdiff_t>(depth));
    for (const auto a : t) {
      const bool hit = top.count(a) > 0;
      auto& pc = per_class[a];
      pc.second += 1;
      if (hit) {
        pc.first += 1;
        ++hit_total;
      }
    }
    relevant_total += t.size();
  }
  if (relevant_total == 0) fail(ErrorCode::EmptyTruthSet, "no query has a nonempty truth set");
  out.overall = static_cast<double>(hit_total) / static_cast<double>(relevant_total);
  double sum = 0.0;
  for (const auto& [cls, hp] : per_class) sum += static_cast<double>(hp.first) / static_cast<double>(hp.second);
  out.evaluated_classes = per_class.size();
  out.per_class_mean = sum / static_cast<double>(per_class.size());
  return out;
}

enum class RetrievalDirection { ImageToText, TextToImage };

/// Fraction of queries with at least one relevant gallery row in the top k.
/// `relevance[q]` lists gallery row indices relevant to query row q. The
/// direction only records which modality plays the query role.
inline double retrieval_recall_at_k(const Mat& queries, const Mat& gallery,
                                    std::span<const std::set<std::size_t>> relevance, std::size_t k) {
  if (k == 0) fail(ErrorCode::ConfigError, "k must be >= 1");
  if (queries.cols() != gallery.cols()) fail(ErrorCode::DimMismatch, "query and gallery widths differ");
  if (relevance.size() != queries.rows()) fail(ErrorCode::EmptyRelevance, "relevance map does not cover every query");
  if (queries.rows() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    if (relevance[q].empty()) fail(ErrorCode::EmptyRelevance, "query " + std::to_string(q) + " has no relevant item");
    const auto p = rank_by_similarity(queries.row(q), gallery, q);
    const std::size_t depth = std::min(k, p.ranked.size());
    for (std::size_t r = 0; r < depth; ++r) {
      if (relevance[q].count(p.ranked[r])) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(queries.rows());
}

/// One-to-one pairing: query row i is relevant only to gallery row i.
inline std::vector<std::set<std::size_t>> paired_relevance(std::size_t n) {
  std::vector<std::set<std::size_t>> rel(n);
  for (std::size_t i = 0; i < n; ++i) rel[i].insert(i);
  return rel;
}

/// Direction-tagged form: image rows query the text gallery for ImageToText
/// and the reverse for TextToImage. `relevance` is indexed by query rows.
inline double retrieval_recall_at_k(const Mat& images, const Mat& texts,
                                    std::span<const std::set<std::size_t>> relevance, std::size_t k,
                                    RetrievalDirection direction) {
  return direction == RetrievalDirection::ImageToText ? retrieval_recall_at_k(images, texts, relevance, k)
                                                      : retrieval_recall_at_k(texts, images, relevance, k);
}

}  // namespace ofclip
