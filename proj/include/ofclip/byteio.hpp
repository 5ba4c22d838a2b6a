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

// Little-endian byte packing independent of host endianness.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "ofclip/error.hpp"

namespace ofclip::bytes {

using Buffer = std::vector<std::uint8_t>;

template <typename U>
void put_uint(Buffer& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

inline void put_f32(Buffer& out, float v) { put_uint(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(Buffer& out, double v) { put_uint(out, std::bit_cast<std::uint64_t>(v)); }
inline void put_raw(Buffer& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

/// Bounds-checked cursor over an in-memory file image.
class Reader {
 public:
  explicit Reader(const Buffer& data) : data_(data) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }

  bool can_read(std::size_t n) const noexcept { return remaining() >= n; }

  template <typename U>
  U get_uint() {
    require(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(data_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }

  float get_f32() { return std::bit_cast<float>(get_uint<std::uint32_t>()); }
  double get_f64() { return std::bit_cast<double>(get_uint<std::uint64_t>()); }

  std::string get_string(std::size_t n) {
    require(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  void require(std::size_t n) const {
    if (!can_read(n)) {
      fail(ErrorCode::CorruptRecord, "unexpected end of data at byte offset " + std::to_string(pos_));
    }
  }

  const Buffer& data_;
  std::size_t pos_ = 0;
};

inline Buffer read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  Buffer data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

inline void write_file(const std::filesystem::path& path, const Buffer& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace ofclip::bytes
