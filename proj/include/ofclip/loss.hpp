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
#include <string>

#include "ofclip/linalg.hpp"

namespace ofclip {

/// Symmetric contrastive loss split into its two directions.
/// total == t2i + i2t.
struct LossBreakdown {
  double total = 0.0;
  double t2i = 0.0;  // text rows ranked against all images
  double i2t = 0.0;  // image rows ranked against all texts
};

struct ContrastiveGrad {
  Mat d_text;     // dL/dU
  Mat d_image;    // dL/dV
  double d_log_scale = 0.0;  // dL/ds with tau = exp(s)
  LossBreakdown loss;
};

namespace detail {

inline void check_contrastive_inputs(const Mat& text, const Mat& image, double tau) {
  if (text.rows() != image.rows() || text.cols() != image.cols()) {
    fail(ErrorCode::DimMismatch, "text and image batches differ in shape");
  }
  if (text.rows() < 2) fail(ErrorCode::DimMismatch, "contrastive loss needs at least 2 pairs");
  if (!std::isfinite(tau) || tau < 0.0) fail(ErrorCode::NonFinite, "temperature must be finite and >= 0");
}

// Mean over rows of -log_softmax(row)[i] at the diagonal.
inline double diagonal_nll(const Mat& logits) {
  const Mat lp = log_softmax_rows(logits);
  double s = 0.0;
  for (std::size_t i = 0; i < lp.rows(); ++i) s -= lp(i, i);
  return s / static_cast<double>(lp.rows());
}

}  // namespace detail

/// text: L x d (u_i), image: L x d (v_i). Row i of each is a matched pair.
inline LossBreakdown contrastive_loss(const Mat& text, const Mat& image, double tau) {
  detail::check_contrastive_inputs(text, image, tau);
  const Mat logits = similarity_logits(text, image, tau);
  LossBreakdown out;
  out.t2i = detail::diagonal_nll(logits);
  out.i2t = detail::diagonal_nll(logits.transpose());
  out.total = out.t2i + out.i2t;
  return out;
}

/// Analytic gradient of contrastive_loss(...).total with respect to both
/// embedding batches and the log-temperature s (tau = exp(s)).
///
/// With S = tau * U V^T, P = softmax_rows(S), Q = softmax_rows(S^T):
///   dL/dS = (P - I)/L + ((Q - I)/L)^T
///   dL/dU = tau * dS V,  dL/dV = tau * dS^T U,  dL/ds = sum(dS .* S).
inline ContrastiveGrad contrastive_grad(const Mat& text, const Mat& image, double log_scale) {
  const double tau = std::exp(log_scale);
  detail::check_contrastive_inputs(text, image, tau);
  const std::size_t n = text.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  const Mat logits = similarity_logits(text, image, tau);
  const Mat lp_rows = log_softmax_rows(logits);
  const Mat lp_cols = log_softmax_rows(logits.transpose());

  ContrastiveGrad g;
  Mat d_logits(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    g.loss.t2i -= lp_rows(i, i);
    g.loss.i2t -= lp_cols(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      // row-softmax term at (i, j) plus column-softmax term at (j, i)
      const double p = std::exp(lp_rows(i, j)) - (i == j ? 1.0 : 0.0);
      const double q = std::exp(lp_cols(j, i)) - (i == j ? 1.0 : 0.0);
      d_logits(i, j) = (p + q) * inv_n;
    }
  }
  g.loss.t2i *= inv_n;
  g.loss.i2t *= inv_n;
  g.loss.total = g.loss.t2i + g.loss.i2t;

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g.d_log_scale += d_logits(i, j) * logits(i, j);

  g.d_text = matmul(d_logits, image);
  g.d_image = matmul(d_logits.transpose(), text);
  for (double& x : g.d_text.data()) x *= tau;
  for (double& x : g.d_image.data()) x *= tau;
  return g;
}

}  // namespace ofclip
