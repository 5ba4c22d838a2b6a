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

// Checkpoint layout (all integers little-endian):
//   "OFCK" | u32 version
//   repeated until EOF:
//     u16 name length | name bytes | u8 rank | rank x u32 dims | prod(dims) x f64

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ofclip/byteio.hpp"
#include "ofclip/encoder.hpp"

namespace ofclip {

inline constexpr char kCheckpointMagic[4] = {'O', 'F', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<double> values;
};

inline std::vector<NamedTensor> encoder_tensors(const DualEncoder& enc) {
  auto mat = [](std::string name, const Mat& m) {
    return NamedTensor{std::move(name),
                       {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())},
                       m.data()};
  };
  auto vec = [](std::string name, const Vec& v) {
    return NamedTensor{std::move(name), {static_cast<std::uint32_t>(v.size())}, v};
  };
  return {
      mat("image.weight", enc.image_weight), vec("image.bias", enc.image_bias),
      mat("text.token_table", enc.token_table), mat("text.weight", enc.text_weight),
      vec("text.bias", enc.text_bias), NamedTensor{"log_scale", {}, {enc.log_scale}},
  };
}

inline bytes::Buffer serialize_checkpoint(const std::vector<NamedTensor>& tensors) {
  bytes::Buffer out;
  bytes::put_raw(out, std::string_view(kCheckpointMagic, 4));
  bytes::put_uint<std::uint32_t>(out, kCheckpointVersion);
  for (const auto& t : tensors) {
    if (t.name.size() > 0xFFFF) fail(ErrorCode::ConfigError, "tensor name too long");
    bytes::put_uint<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    bytes::put_raw(out, t.name);
    bytes::put_uint<std::uint8_t>(out, static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) bytes::put_uint<std::uint32_t>(out, d);
    for (double x : t.values) bytes::put_f64(out, x);
  }
  return out;
}

inline std::vector<NamedTensor> deserialize_checkpoint(const bytes::Buffer& data) {
  bytes::Reader in(data);
  if (!in.can_read(4) || in.get_string(4) != std::string_view(kCheckpointMagic, 4)) {
    fail(ErrorCode::BadMagic, "not a checkpoint file");
  }
  const auto version = in.get_uint<std::uint32_t>();
  if (version != kCheckpointVersion) {
    fail(ErrorCode::UnsupportedVersion, "checkpoint version " + std::to_string(version));
  }
  std::vector<NamedTensor> tensors;
  while (!in.at_end()) {
    const std::size_t start = in.offset();
    try {
      NamedTensor t;
      t.name = in.get_string(in.get_uint<std::uint16_t>());
      const auto rank = in.get_uint<std::uint8_t>();
      std::uint64_t count = 1;
      for (std::uint8_t r = 0; r < rank; ++r) {
        t.dims.push_back(in.get_uint<std::uint32_t>());
        count *= t.dims.back();
      }
      if (count > in.remaining() / 8) fail(ErrorCode::CorruptRecord, "tensor overruns file");
      t.values.resize(count);
      for (auto& x : t.values) x = in.get_f64();
      tensors.push_back(std::move(t));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CorruptRecord) throw;
      fail(ErrorCode::CorruptRecord, "truncated tensor at byte offset " + std::to_string(start));
    }
  }
  return tensors;
}

inline DualEncoder encoder_from_tensors(const std::vector<NamedTensor>& tensors) {
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;
  auto get = [&](const std::string& name, std::size_t rank) -> const NamedTensor& {
    auto it = by_name.find(name);
    if (it == by_name.end()) fail(ErrorCode::MissingField, "checkpoint lacks tensor " + name);
    if (it->second->dims.size() != rank) fail(ErrorCode::ShapeMismatch, "tensor " + name + " has wrong rank");
    return *it->second;
  };
  auto mat = [&](const std::string& name) {
    const auto& t = get(name, 2);
    return Mat(t.dims[0], t.dims[1], t.values);
  };
  DualEncoder enc;
  enc.image_weight = mat("image.weight");
  enc.image_bias = get("image.bias", 1).values;
  enc.token_table = mat("text.token_table");
  enc.text_weight = mat("text.weight");
  enc.text_bias = get("text.bias", 1).values;
  enc.log_scale = get("log_scale", 0).values.at(0);

  const std::size_t d = enc.image_weight.cols();
  if (enc.image_bias.size() != d || enc.text_weight.cols() != d || enc.text_bias.size() != d ||
      enc.text_weight.rows() != enc.token_table.cols()) {
    fail(ErrorCode::ShapeMismatch, "checkpoint tensors have inconsistent shapes");
  }
  return enc;
}

inline void save_checkpoint(const std::filesystem::path& path, const DualEncoder& enc) {
  bytes::write_file(path, serialize_checkpoint(encoder_tensors(enc)));
}

inline DualEncoder load_checkpoint(const std::filesystem::path& path) {
  return encoder_from_tensors(deserialize_checkpoint(bytes::read_file(path)));
}

}  // namespace ofclip
