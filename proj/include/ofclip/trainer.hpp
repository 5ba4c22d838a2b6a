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

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ofclip/adamw.hpp"
#include "ofclip/encoder.hpp"
#include "ofclip/loss.hpp"

namespace ofclip {

/// One image-text pair after tokenization, ready for the encoder.
struct TrainingExample {
  Vec features;
  std::vector<std::uint32_t> tokens;
};

struct EncodedBatch {
  Mat text;   // L x embed, unit rows
  Mat image;  // L x embed, unit rows
};

inline EncodedBatch encode_batch(std::span<const TrainingExample> batch, const DualEncoder& enc) {
  const std::size_t d = enc.image_weight.cols();
  EncodedBatch out{Mat(batch.size(), d), Mat(batch.size(), d)};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Vec u = encode_text(batch[i].tokens, enc);
    const Vec v = encode_image(batch[i].features, enc);
    std::copy(u.begin(), u.end(), out.text.row(i).begin());
    std::copy(v.begin(), v.end(), out.image.row(i).begin());
  }
  return out;
}

/// Full gradient of the batch loss with respect to every encoder parameter.
inline EncoderGrads encoder_gradients(std::span<const TrainingExample> batch, const DualEncoder& enc,
                                      LossBreakdown* loss_out = nullptr) {
  const std::size_t n = batch.size();
  const std::size_t d = enc.image_weight.cols();
  std::vector<Vec> mean_tokens(n), z_text(n), z_image(n);
  Mat text(n, d), image(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    mean_tokens[i] = mean_token_embedding(batch[i].tokens, enc);
    z_text[i] = project_text(mean_tokens[i], enc);
    z_image[i] = project_image(batch[i].features, enc);
    const Vec u = l2_normalize(z_text[i]);
    const Vec v = l2_normalize(z_image[i]);
    std::copy(u.begin(), u.end(), text.row(i).begin());
    std::copy(v.begin(), v.end(), image.row(i).begin());
  }

  const ContrastiveGrad cg = contrastive_grad(text, image, enc.log_scale);
  if (loss_out) *loss_out = cg.loss;

  EncoderGrads g = EncoderGrads::zeros_like(enc);
  g.log_scale = cg.d_log_scale;
  const std::size_t dt = enc.token_table.cols();
  for (std::size_t i = 0; i < n; ++i) {
    // image head
    const Vec dz_img = normalize_backward(z_image[i], cg.d_image.row(i));
    const auto& f = batch[i].features;
    for (std::size_t a = 0; a < f.size(); ++a)
      for (std::size_t j = 0; j < d; ++j) g.image_weight(a, j) += f[a] * dz_img[j];
    for (std::size_t j = 0; j < d; ++j) g.image_bias[j] += dz_img[j];

    // text head, then back into the token table through the mean
    const Vec dz_txt = normalize_backward(z_text[i], cg.d_text.row(i));
    Vec d_mean(dt, 0.0);
    for (std::size_t a = 0; a < dt; ++a) {
      for (std::size_t j = 0; j < d; ++j) {
        g.text_weight(a, j) += mean_tokens[i][a] * dz_txt[j];
        d_mean[a] += enc.text_weight(a, j) * dz_txt[j];
      }
    }
    for (std::size_t j = 0; j < d; ++j) g.text_bias[j] += dz_txt[j];
    const double inv = 1.0 / static_cast<double>(batch[i].tokens.size());
    for (const auto t : batch[i].tokens) {
      auto row = g.token_table.row(t);
      for (std::size_t a = 0; a < dt; ++a) row[a] += d_mean[a] * inv;
    }
  }
  return g;
}

/// Optimizer view over the encoder. log_scale is never decayed and is clamped
/// so that the temperature stays at or below 100.
inline std::array<ParamSlot, 6> optimizer_slots(DualEncoder& enc, const EncoderGrads& g) {
  static const double kMaxLogScale = std::log(kMaxTemperature);
  return {{
      {enc.image_weight.data(), g.image_weight.data(), true, std::nullopt},
      {enc.image_bias, g.image_bias, true, std::nullopt},
      {enc.token_table.data(), g.token_table.data(), true, std::nullopt},
      {enc.text_weight.data(), g.text_weight.data(), true, std::nullopt},
      {enc.text_bias, g.text_bias, true, std::nullopt},
      {std::span<double>(&enc.log_scale, 1), std::span<const double>(&g.log_scale, 1), false,
       kMaxLogScale},
  }};
}

/// Encodes the batch, backpropagates the symmetric loss through both heads and
/// the temperature, and applies one AdamW update to every tensor. Returns the
/// loss of the pre-step encoder.
inline LossBreakdown train_step(DualEncoder& enc, std::span<const TrainingExample> batch,
                                AdamWState& opt, const TrainConfig& cfg) {
  if (batch.empty()) fail(ErrorCode::DimMismatch, "empty batch");
  LossBreakdown loss;
  const EncoderGrads g = encoder_gradients(batch, enc, &loss);
  auto slots = optimizer_slots(enc, g);
  adamw_step(slots, opt, cfg);
  return loss;
}

}  // namespace ofclip
