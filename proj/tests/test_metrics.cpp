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


#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "metric_suite.hpp"
#include "ofclip/metrics.hpp"

using namespace ofclip;

namespace {

RankedPrediction fixed_ranking(std::size_t query, std::vector<std::size_t> ranked) {
  RankedPrediction p;
  p.query = query;
  p.ranked = std::move(ranked);
  p.scores.assign(p.ranked.size(), 0.0);
  return p;
}

RankedPrediction top1(std::size_t query, std::size_t cls, std::size_t classes) {
  std::vector<std::size_t> r{cls};
  for (std::size_t c = 0; c < classes; ++c)
    if (c != cls) r.push_back(c);
  return fixed_ranking(query, r);
}

}  // namespace

TEST(ZeroShotRank, Example) {
  const Mat classes{{1, 0}, {0, 1}};
  const auto p = zero_shot_rank(Vec{0.8, 0.6}, classes);
  EXPECT_EQ(p.ranked, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(p.scores, (std::vector<double>{0.8, 0.6}));
}

TEST(ZeroShotRank, TiesGoToLowerIndex) {
  const Mat classes{{0, 1}, {1, 0}, {0, 1}, {1, 0}};
  const auto p = zero_shot_rank(Vec{0.5, 0.5}, classes);
  EXPECT_EQ(p.ranked, (std::vector<std::size_t>{0, 1, 2, 3}));
  const auto q = zero_shot_rank(Vec{1, 0}, classes);
  EXPECT_EQ(q.ranked, (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(ZeroShotRank, ScaleInvariant) {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat classes = oracle::random_mat(1 + rng.uniform_index(20), 5, rng);
    Vec img(5);
    for (double& x : img) x = rng.normal();
    Vec scaled = img;
    for (double& x : scaled) x *= 8.0;  // power of two keeps scores exact
    EXPECT_EQ(zero_shot_rank(img, classes).ranked, zero_shot_rank(scaled, classes).ranked);
  }
}

TEST(AccuracyAtK, TruthAtFixedPosition) {
  std::vector<RankedPrediction> preds;
  std::vector<std::size_t> truth;
  for (std::size_t q = 0; q < 10; ++q) {
    preds.push_back(fixed_ranking(q, {4, 2, 0, 3, 1}));
    truth.push_back(3);  // always at position 3 (0-based)
  }
  EXPECT_EQ(accuracy_at_k(preds, truth, 3), 0.0);
  EXPECT_EQ(accuracy_at_k(preds, truth, 4), 1.0);
  EXPECT_EQ(accuracy_at_k(preds, truth, 100), 1.0);
  EXPECT_OFCLIP_ERROR(accuracy_at_k(preds, std::vector<std::size_t>{1}, 1), ErrorCode::MissingTruth);
}

TEST(WeightedF1, WorkedExample) {
  // Class A = 0 has support 3 (two right, one predicted B); class B = 1 has support 1.
  const std::vector<RankedPrediction> preds = {top1(0, 0, 2), top1(1, 0, 2), top1(2, 1, 2), top1(3, 1, 2)};
  const std::vector<std::size_t> truth = {0, 0, 0, 1};
  EXPECT_NEAR(weighted_f1(preds, truth), (3 * 0.8 + 2.0 / 3.0) / 4.0, 1e-15);
  EXPECT_NEAR(weighted_f1(preds, truth), 0.766667, 1e-6);
}

TEST(WeightedF1, PerfectAndDiagonal) {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t classes = 2 + rng.uniform_index(6), n = 1 + rng.uniform_index(30);
    std::vector<RankedPrediction> preds;
    std::vector<std::size_t> truth, predicted;
    bool diagonal = true;
    for (std::size_t q = 0; q < n; ++q) {
      truth.push_back(rng.uniform_index(classes));
      predicted.push_back(rng.uniform_index(3) == 0 ? rng.uniform_index(classes) : truth.back());
      diagonal = diagonal && predicted.back() == truth.back();
      preds.push_back(top1(q, predicted.back(), classes));
    }
    EXPECT_EQ(weighted_f1(preds, truth) == 1.0, diagonal);
  }
}

TEST(WeightedF1, BalancedEqualsMacro) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t classes = 2 + rng.uniform_index(6), per = 1 + rng.uniform_index(6);
    std::vector<RankedPrediction> preds;
    std::vector<std::size_t> truth, predicted;
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t i = 0; i < per; ++i) {
        truth.push_back(c);
        predicted.push_back(rng.uniform_index(classes));
        preds.push_back(top1(truth.size() - 1, predicted.back(), classes));
      }
    }
    EXPECT_NEAR(weighted_f1(preds, truth), oracle::macro_f1(predicted, truth, classes), 1e-12);
  }
}

TEST(MultilabelRecall, Examples) {
  const std::vector<std::set<std::size_t>> truth = {{0, 1}};
  const std::vector<RankedPrediction> preds = {fixed_ranking(0, {0, 2, 3, 1})};
  const auto r = multilabel_recall_at_k(preds, truth, 3);
  EXPECT_EQ(r.overall, 0.5);
  EXPECT_EQ(r.per_class_mean, 0.5);
  const auto all = multilabel_recall_at_k(preds, truth, 4);
  EXPECT_EQ(all.overall, 1.0);
  EXPECT_EQ(all.per_class_mean, 1.0);
}

TEST(MultilabelRecall, EmptyTruthIsExcluded) {
  const std::vector<std::set<std::size_t>> truth = {{}, {2}};
  const std::vector<RankedPrediction> preds = {fixed_ranking(0, {0, 1, 2}), fixed_ranking(1, {2, 0, 1})};
  const auto r = multilabel_recall_at_k(preds, truth, 1);
  EXPECT_EQ(r.excluded_queries, 1u);
  EXPECT_EQ(r.evaluated_queries, 1u);
  EXPECT_EQ(r.overall, 1.0);
  const std::vector<std::set<std::size_t>> none = {{}, {}};
  EXPECT_OFCLIP_ERROR(multilabel_recall_at_k(preds, none, 1), ErrorCode::EmptyTruthSet);
}

TEST(RetrievalRecall, RelevantAtRankTwo) {
  const Mat queries{{1, 0}};
  const Mat gallery{{1, 0}, {0.9, 0.1}, {0, 1}, {-1, 0}, {0, -1}};
  const std::vector<std::set<std::size_t>> rel = {{1}};
  EXPECT_EQ(retrieval_recall_at_k(queries, gallery, rel, 1), 0.0);
  EXPECT_EQ(retrieval_recall_at_k(queries, gallery, rel, 5), 1.0);
}

TEST(RetrievalRecall, MonotoneAndCompleteAtGallerySize) {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(30);
    const Mat imgs = oracle::random_unit_rows(n, 4, rng), txts = oracle::random_unit_rows(n, 4, rng);
    const auto rel = paired_relevance(n);
    double prev = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (auto dir : {RetrievalDirection::ImageToText, RetrievalDirection::TextToImage}) {
        const double r = retrieval_recall_at_k(imgs, txts, rel, k, dir);
        if (dir == RetrievalDirection::ImageToText) {
          EXPECT_GE(r, prev);
          prev = r;
        }
        if (k == n) EXPECT_EQ(r, 1.0);
      }
    }
  }
}

TEST(RetrievalRecall, ScaleInvariant) {
  SplitMix64 rng(10);
  const Mat imgs = oracle::random_unit_rows(20, 6, rng), txts = oracle::random_unit_rows(20, 6, rng);
  Mat scaled = imgs;
  for (double& x : scaled.data()) x *= 4.0;
  const auto rel = paired_relevance(20);
  for (std::size_t k : {1u, 5u, 10u}) EXPECT_EQ(retrieval_recall_at_k(imgs, txts, rel, k), retrieval_recall_at_k(scaled, txts, rel, k));
}

TEST(RetrievalRecall, Errors) {
  const Mat q{{1, 0}};
  EXPECT_OFCLIP_ERROR(retrieval_recall_at_k(q, q, std::vector<std::set<std::size_t>>{{}}, 1), ErrorCode::EmptyRelevance);
  EXPECT_OFCLIP_ERROR(retrieval_recall_at_k(q, Mat{{1, 0, 0}}, paired_relevance(1), 1), ErrorCode::DimMismatch);
}

TEST(MetricOracles, RandomInstancesMatchExactly) {
  const auto r = oracle::run_random_suite(12345, 1000);
  EXPECT_EQ(r.instances, 1000u);
  EXPECT_EQ(r.mismatches, 0u) << r.first_failure;
}
