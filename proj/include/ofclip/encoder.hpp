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

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ofclip/linalg.hpp"
#include "ofclip/rng.hpp"

namespace ofclip {

/// ln(1/0.07): the usual CLIP starting point for the learnable scale.
inline constexpr double kInitialLogScale = 2.659260036932778;
inline constexpr double kMaxTemperature = 100.0;
/// Token rows start small so the projection, not the table, dominates early.
inline constexpr double kTokenInitStd = 0.1;

struct EncoderDims {
  std::size_t image_in = 16;   // input feature width
  std::size_t embed = 8;       // shared embedding width
  std::size_t vocab = 4096;    // token table rows
  std::size_t token_dim = 16;  // token embedding width
};

/// Smallest differentiable dual encoder: a linear image head, and an
/// embedding-bag-mean text head followed by a linear projection. Both
/// outputs are L2-normalized. The temperature is exp(log_scale).
struct DualEncoder {
  Mat image_weight;  // image_in x embed
  Vec image_bias;    // embed
  Mat token_table;   // vocab x token_dim
  Mat text_weight;   // token_dim x embed
  Vec text_bias;     // embed
  double log_scale = kInitialLogScale;

  static DualEncoder initialize(const EncoderDims& dims, std::uint64_t seed) {
    if (dims.image_in == 0 || dims.embed == 0 || dims.vocab < 3 || dims.token_dim == 0) {
      fail(ErrorCode::ConfigError, "encoder dimensions must be positive and vocab > 2");
    }
    SplitMix64 rng(seed);
    DualEncoder enc;
    enc.image_weight = Mat(dims.image_in, dims.embed);
    enc.image_bias.assign(dims.embed, 0.0);
    enc.token_table = Mat(dims.vocab, dims.token_dim);
    enc.text_weight = Mat(dims.token_dim, dims.embed);
    enc.text_bias.assign(dims.embed, 0.0);
    const double s_img = 1.0 / std::sqrt(static_cast<double>(dims.image_in));
    const double s_txt = 1.0 / std::sqrt(static_cast<double>(dims.token_dim));
    for (double& x : enc.image_weight.data()) x = s_img * rng.normal();
    for (double& x : enc.token_table.data()) x = kTokenInitStd * rng.normal();
    for (double& x : enc.text_weight.data()) x = s_txt * rng.normal();
    return enc;
  }

  EncoderDims dims() const {
    return {image_weight.rows(), image_weight.cols(), token_table.rows(), token_table.cols()};
  }

  double temperature() const { return std::exp(log_scale); }
};

/// Pre-normalization image projection W^T x + b.
inline Vec project_image(std::span<const double> features, const DualEncoder& enc) {
  const Mat& w = enc.image_weight;
  if (features.size() != w.rows()) {
    fail(ErrorCode::DimMismatch, "image features have width " + std::to_string(features.size()) +
                                     ", encoder expects " + std::to_string(w.rows()));
  }
  if (!all_finite(features)) fail(ErrorCode::NonFinite, "image features are not finite");
  Vec z = enc.image_bias;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double f = features[i];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < w.cols(); ++j) z[j] += f * w(i, j);
  }
  return z;
}

/// Mean of the selected token rows.
inline Vec mean_token_embedding(std::span<const std::uint32_t> tokens, const DualEncoder& enc) {
  if (tokens.empty()) fail(ErrorCode::EmptyText, "token sequence is empty");
  const Mat& table = enc.token_table;
  Vec mean(table.cols(), 0.0);
  for (const auto t : tokens) {
    if (t >= table.rows()) {
      fail(ErrorCode::TokenOutOfRange, "token id " + std::to_string(t) + " outside vocab of " +
                                           std::to_string(table.rows()));
    }
    auto r = table.row(t);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += r[j];
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (double& x : mean) x *= inv;
  return mean;
}

/// Pre-normalization text projection W^T mean(E[tokens]) + b.
inline Vec project_text(std::span<const double> mean_tokens, const DualEncoder& enc) {
  const Mat& w = enc.text_weight;
  Vec z = enc.text_bias;
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) z[j] += mean_tokens[i] * w(i, j);
  return z;
}

inline Vec encode_image(std::span<const double> features, const DualEncoder& enc) {
  return l2_normalize(project_image(features, enc));
}

inline Vec encode_text(std::span<const std::uint32_t> tokens, const DualEncoder& enc) {
  const Vec mean = mean_token_embedding(tokens, enc);
  return l2_normalize(project_text(mean, enc));
}

/// Gradient buffers with the same layout as DualEncoder.
struct EncoderGrads {
  Mat image_weight;
  Vec image_bias;
  Mat token_table;
  Mat text_weight;
  Vec text_bias;
  double log_scale = 0.0;

  static EncoderGrads zeros_like(const DualEncoder& enc) {
    EncoderGrads g;
    g.image_weight = Mat(enc.image_weight.rows(), enc.image_weight.cols());
    g.image_bias.assign(enc.image_bias.size(), 0.0);
    g.token_table = Mat(enc.token_table.rows(), enc.token_table.cols());
    g.text_weight = Mat(enc.text_weight.rows(), enc.text_weight.cols());
    g.text_bias.assign(enc.text_bias.size(), 0.0);
    return g;
  }
};

/// Backprop through y = z/|z|: dz = (dy - y <y, dy>) / |z|.
inline Vec normalize_backward(std::span<const double> z, std::span<const double> dy) {
  const double n = norm(z);
  double proj = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) proj += z[i] * dy[i];
  proj /= n;
  Vec dz(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) dz[i] = (dy[i] - (z[i] / n) * proj) / n;
  return dz;
}

}  // namespace ofclip
