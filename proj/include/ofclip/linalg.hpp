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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "ofclip/error.hpp"

namespace ofclip {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Mat(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      fail(ErrorCode::ShapeMismatch, "matrix data length " + std::to_string(data_.size()) +
                                         " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }
  Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) fail(ErrorCode::ShapeMismatch, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat from_rows(std::span<const Vec> rows) {
    if (rows.empty()) return {};
    Mat m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) fail(ErrorCode::DimMismatch, "rows of unequal length");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Vec row_vec(std::size_t r) const {
    auto s = row(r);
    return Vec(s.begin(), s.end());
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Mat&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::DimMismatch, "dot of unequal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline constexpr double kZeroNormThreshold = 1e-12;

inline Vec l2_normalize(std::span<const double> v) {
  if (v.empty()) fail(ErrorCode::DimMismatch, "cannot normalize an empty vector");
  const double n = norm(v);
  if (!std::isfinite(n)) fail(ErrorCode::NonFinite, "vector has non-finite entries");
  if (n < kZeroNormThreshold) fail(ErrorCode::ZeroVector, "vector norm below 1e-12");
  Vec out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

/// Normalizes every row of `m` in place.
inline void l2_normalize_rows(Mat& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const Vec r = l2_normalize(m.row(i));
    std::copy(r.begin(), r.end(), m.row(i).begin());
  }
}

/// a * b^T for row-major a (n x d) and b (m x d).
inline Mat matmul_transposed(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) fail(ErrorCode::DimMismatch, "inner dimensions differ");
  Mat out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
  return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::DimMismatch, "inner dimensions differ");
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

/// Entry (i, j) = tau * <u_i, v_j>. The temperature multiplies the cosine.
inline Mat similarity_logits(const Mat& u, const Mat& v, double tau) {
  if (u.cols() != v.cols() || u.rows() != v.rows()) {
    fail(ErrorCode::DimMismatch, "similarity_logits expects equal shapes, got " +
                                     std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                                     " and " + std::to_string(v.rows()) + "x" +
                                     std::to_string(v.cols()));
  }
  Mat s = matmul_transposed(u, v);
  for (double& x : s.data()) x *= tau;
  return s;
}

/// Row-wise log-softmax with max subtraction.
inline Mat log_softmax_rows(const Mat& m) {
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    if (r.empty()) continue;
    const double mx = *std::max_element(r.begin(), r.end());
    double sum = 0.0;
    for (double x : r) sum += std::exp(x - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t j = 0; j < r.size(); ++j) out(i, j) = r[j] - lse;
  }
  return out;
}

}  // namespace ofclip
