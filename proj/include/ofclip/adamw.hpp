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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ofclip/error.hpp"

namespace ofclip {

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-6;
  double weight_decay = 0.2;
  std::uint32_t epochs = 60;
  std::uint32_t batch_size = 64;
  std::uint64_t seed = 0;
  /// Multiplier on lr as a function of the 1-based step; constant when empty.
  std::function<double(std::uint64_t)> lr_schedule;

  /// Values used for the full-scale fine-tuning run (pretrained backbone).
  static TrainConfig full_scale_defaults() {
    TrainConfig c;
    c.lr = 5e-7;
    c.batch_size = 2048;
    c.epochs = 60;
    return c;
  }

  void validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) fail(ErrorCode::ConfigError, "lr must be finite and >= 0");
    if (!(beta1 > 0.0 && beta1 < 1.0)) fail(ErrorCode::ConfigError, "beta1 must lie in (0, 1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) fail(ErrorCode::ConfigError, "beta2 must lie in (0, 1)");
    if (!(eps > 0.0)) fail(ErrorCode::ConfigError, "eps must be > 0");
    if (!(weight_decay >= 0.0)) fail(ErrorCode::ConfigError, "weight_decay must be >= 0");
    if (batch_size == 0) fail(ErrorCode::ConfigError, "batch_size must be >= 1");
  }
};

/// One trainable tensor as seen by the optimizer.
struct ParamSlot {
  std::span<double> values;
  std::span<const double> grads;
  bool decay = true;
  std::optional<double> clamp_max;  // applied after the update
};

struct AdamWState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// One AdamW update over every slot. Adam moments with bias correction, then
/// decoupled decay p <- p - lr * wd * p on slots with decay enabled.
inline void adamw_step(std::span<ParamSlot> params, AdamWState& state, const TrainConfig& cfg) {
  if (state.m.empty() && state.v.empty() && state.step == 0) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i].values.size(), 0.0);
      state.v[i].assign(params[i].values.size(), 0.0);
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    fail(ErrorCode::ShapeMismatch, "optimizer state holds " + std::to_string(state.m.size()) +
                                       " tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto n = params[i].values.size();
    if (params[i].grads.size() != n || state.m[i].size() != n || state.v[i].size() != n) {
      fail(ErrorCode::ShapeMismatch, "parameter/gradient/state sizes disagree at tensor " +
                                         std::to_string(i));
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double lr = cfg.lr * (cfg.lr_schedule ? cfg.lr_schedule(state.step) : 1.0);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& slot = params[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t k = 0; k < slot.values.size(); ++k) {
      const double g = slot.grads[k];
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      double p = slot.values[k];
      p -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
      if (slot.decay) p -= lr * cfg.weight_decay * slot.values[k];
      if (slot.clamp_max && p > *slot.clamp_max) p = *slot.clamp_max;
      slot.values[k] = p;
    }
  }
}

}  // namespace ofclip
