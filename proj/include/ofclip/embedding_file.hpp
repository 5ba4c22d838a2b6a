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

// Embedding interchange file, little-endian:
//
//   offset 0   "OFCE"
//   offset 4   u32 version (1)
//   offset 8   u32 dim
//   offset 12  u64 count
//   offset 20  count records of: u16 id length | id bytes (UTF-8) | dim x f32
//
// A header-only file is 20 bytes; a record costs 2 + |id| + 4 * dim bytes.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ofclip/byteio.hpp"
#include "ofclip/linalg.hpp"

namespace ofclip {

inline constexpr char kEmbeddingMagic[4] = {'O', 'F', 'C', 'E'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 20;

/// Stored vectors must have |norm - 1| within this bound.
inline constexpr double kNormTolerance = 1e-5;
/// Deviations below this are float32 rounding and are left untouched on read,
/// so that re-serializing a file reproduces it byte for byte.
inline constexpr double kRenormalizeSlack = 0x1.0p-20;

struct EmbeddingSet {
  std::vector<std::string> ids;
  Mat vectors;  // count x dim

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t dim() const noexcept { return vectors.cols(); }

  std::unordered_map<std::string, std::size_t> index() const {
    std::unordered_map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], i);
    return out;
  }
};

struct EmbeddingHeader {
  std::uint32_t version = 0;
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
};

inline bytes::Buffer serialize_embeddings(std::span<const std::string> ids, const Mat& vectors) {
  if (ids.size() != vectors.rows()) {
    fail(ErrorCode::DimMismatch, std::to_string(ids.size()) + " ids for " +
                                     std::to_string(vectors.rows()) + " vectors");
  }
  std::unordered_set<std::string> seen;
  bytes::Buffer out;
  out.reserve(kEmbeddingHeaderBytes + ids.size() * (8 + 4 * vectors.cols()));
  bytes::put_raw(out, std::string_view(kEmbeddingMagic, 4));
  bytes::put_uint<std::uint32_t>(out, kEmbeddingVersion);
  bytes::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(vectors.cols()));
  bytes::put_uint<std::uint64_t>(out, ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen.insert(ids[i]).second) fail(ErrorCode::DuplicateId, "duplicate id '" + ids[i] + "'");
    if (ids[i].size() > 0xFFFF) fail(ErrorCode::CorruptRecord, "id longer than 65535 bytes");
    const auto row = vectors.row(i);
    const double n = norm(row);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
      fail(ErrorCode::NotNormalized, "vector '" + ids[i] + "' has norm " + std::to_string(n));
    }
    bytes::put_uint<std::uint16_t>(out, static_cast<std::uint16_t>(ids[i].size()));
    bytes::put_raw(out, ids[i]);
    for (double x : row) bytes::put_f32(out, static_cast<float>(x));
  }
  return out;
}

inline EmbeddingHeader parse_embedding_header(bytes::Reader& in) {
  if (!in.can_read(kEmbeddingHeaderBytes)) fail(ErrorCode::BadMagic, "file shorter than header");
  if (in.get_string(4) != std::string_view(kEmbeddingMagic, 4)) fail(ErrorCode::BadMagic, "missing OFCE magic");
  EmbeddingHeader h;
  h.version = in.get_uint<std::uint32_t>();
  if (h.version != kEmbeddingVersion) {
    fail(ErrorCode::UnsupportedVersion, "embedding file version " + std::to_string(h.version));
  }
  h.dim = in.get_uint<std::uint32_t>();
  h.count = in.get_uint<std::uint64_t>();
  return h;
}

inline EmbeddingSet deserialize_embeddings(const bytes::Buffer& data) {
  bytes::Reader in(data);
  const EmbeddingHeader h = parse_embedding_header(in);
  if (h.count > 0 && h.dim == 0) fail(ErrorCode::CorruptRecord, "records with zero dimension");
  EmbeddingSet set;
  set.vectors = Mat(0, h.dim);
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  for (std::uint64_t r = 0; r < h.count; ++r) {
    const std::size_t start = in.offset();
    auto corrupt = [&] {
      fail(ErrorCode::CorruptRecord, "record " + std::to_string(r) + " truncated at byte offset " +
                                         std::to_string(start));
    };
    if (!in.can_read(2)) corrupt();
    const auto len = in.get_uint<std::uint16_t>();
    if (!in.can_read(len + 4 * static_cast<std::size_t>(h.dim))) corrupt();
    std::string id = in.get_string(len);
    if (!seen.insert(id).second) fail(ErrorCode::DuplicateId, "duplicate id '" + id + "'");
    Vec v(h.dim);
    for (auto& x : v) x = static_cast<double>(in.get_f32());
    const double n = norm(v);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
      fail(ErrorCode::NotNormalized, "record '" + id + "' at byte offset " + std::to_string(start) +
                                         " has norm " + std::to_string(n));
    }
    if (std::abs(n - 1.0) > kRenormalizeSlack) {
      for (auto& x : v) x /= n;
    }
    values.insert(values.end(), v.begin(), v.end());
    set.ids.push_back(std::move(id));
  }
  if (!in.at_end()) {
    fail(ErrorCode::CorruptRecord, "trailing bytes after last record at byte offset " +
                                       std::to_string(in.offset()));
  }
  set.vectors = Mat(set.ids.size(), h.dim, std::move(values));
  return set;
}

inline void write_embeddings(const std::filesystem::path& path, std::span<const std::string> ids,
                             const Mat& vectors) {
  bytes::write_file(path, serialize_embeddings(ids, vectors));
}

inline EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  return deserialize_embeddings(bytes::read_file(path));
}

inline EmbeddingHeader inspect_embeddings(const std::filesystem::path& path) {
  const auto data = bytes::read_file(path);
  bytes::Reader in(data);
  return parse_embedding_header(in);
}

}  // namespace ofclip
