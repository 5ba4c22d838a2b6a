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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ofclip/byteio.hpp"
#include "ofclip/linalg.hpp"

namespace ofclip {

/// 8-bit raster, row-major, channels interleaved.
struct PixelImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;

  static PixelImage filled(std::size_t h, std::size_t w, std::size_t c, std::uint8_t value) {
    return {h, w, c, std::vector<std::uint8_t>(h * w * c, value)};
  }

  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return pixels[(y * width + x) * channels + c];
  }
  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c = 0) {
    return pixels[(y * width + x) * channels + c];
  }

  void validate() const {
    if (height == 0 || width == 0) fail(ErrorCode::ShapeMismatch, "image has an empty edge");
    if (channels != 1 && channels != 3) fail(ErrorCode::ShapeMismatch, "image must have 1 or 3 channels");
    if (pixels.size() != height * width * channels) {
      fail(ErrorCode::ShapeMismatch, "pixel buffer does not match height*width*channels");
    }
  }

  bool operator==(const PixelImage&) const = default;
};

/// Scales so the shorter edge equals `target`; the longer edge scales by the
/// same factor, rounded to nearest (minimum 1). Bilinear sampling with
/// pixel-center alignment and edge clamping.
inline PixelImage resize_shortest_edge(const PixelImage& img, std::size_t target) {
  if (target < 1) fail(ErrorCode::InvalidTarget, "resize target must be >= 1");
  img.validate();
  const std::size_t shortest = std::min(img.height, img.width);
  const double scale = static_cast<double>(target) / static_cast<double>(shortest);
  auto scaled = [&](std::size_t edge) {
    if (edge == shortest) return target;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(edge) * scale)));
  };
  const std::size_t out_h = img.height <= img.width ? target : scaled(img.height);
  const std::size_t out_w = img.height <= img.width ? scaled(img.width) : target;

  PixelImage out{out_h, out_w, img.channels, std::vector<std::uint8_t>(out_h * out_w * img.channels)};
  const double sy = static_cast<double>(img.height) / static_cast<double>(out_h);
  const double sx = static_cast<double>(img.width) / static_cast<double>(out_w);
  auto source_coord = [](std::size_t i, double s, std::size_t n, std::size_t& lo, std::size_t& hi) {
    double p = (static_cast<double>(i) + 0.5) * s - 0.5;
    p = std::clamp(p, 0.0, static_cast<double>(n - 1));
    lo = static_cast<std::size_t>(std::floor(p));
    hi = std::min(lo + 1, n - 1);
    return p - static_cast<double>(lo);
  };
  for (std::size_t y = 0; y < out_h; ++y) {
    std::size_t y0, y1;
    const double fy = source_coord(y, sy, img.height, y0, y1);
    for (std::size_t x = 0; x < out_w; ++x) {
      std::size_t x0, x1;
      const double fx = source_coord(x, sx, img.width, x0, x1);
      for (std::size_t c = 0; c < img.channels; ++c) {
        const double top = (1.0 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c);
        const double bottom = (1.0 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c);
        const double v = (1.0 - fy) * top + fy * bottom;
        out.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

/// Window of h x w with top-left corner at (floor((H-h)/2), floor((W-w)/2)).
inline PixelImage center_crop(const PixelImage& img, std::size_t h, std::size_t w) {
  img.validate();
  if (h == 0 || w == 0 || h > img.height || w > img.width) {
    fail(ErrorCode::CropTooLarge, "crop " + std::to_string(h) + "x" + std::to_string(w) +
                                      " does not fit " + std::to_string(img.height) + "x" +
                                      std::to_string(img.width));
  }
  const std::size_t top = (img.height - h) / 2;
  const std::size_t left = (img.width - w) / 2;
  PixelImage out{h, w, img.channels, {}};
  out.pixels.reserve(h * w * img.channels);
  for (std::size_t y = 0; y < h; ++y) {
    const auto* src = &img.pixels[((top + y) * img.width + left) * img.channels];
    out.pixels.insert(out.pixels.end(), src, src + w * img.channels);
  }
  return out;
}

/// p -> 255 - p. Dark-background grayscale scans become white-background.
inline PixelImage invert_grayscale(const PixelImage& img) {
  if (img.channels != 1) fail(ErrorCode::NotGrayscale, "inversion expects a single channel");
  PixelImage out = img;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(255 - p);
  return out;
}

/// Resize + center crop to side x side, then flatten to [0, 1] features.
inline Vec image_features(const PixelImage& img, std::size_t side, bool invert) {
  PixelImage p = invert ? invert_grayscale(img) : img;
  p = center_crop(resize_shortest_edge(p, side), side, side);
  Vec out(p.pixels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(p.pixels[i]) / 255.0;
  return out;
}

/// Reads binary PGM (P5) or PPM (P6) files with maxval 255.
inline PixelImage read_netpbm(const std::filesystem::path& path) {
  const auto data = bytes::read_file(path);
  std::size_t pos = 0;
  auto bad = [&](const std::string& why) -> void {
    fail(ErrorCode::ParseError, path.string() + ": " + why);
  };
  auto skip_space = [&] {
    for (;;) {
      while (pos < data.size() && std::isspace(data[pos])) ++pos;
      if (pos < data.size() && data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else {
        return;
      }
    }
  };
  auto number = [&]() -> std::size_t {
    skip_space();
    if (pos >= data.size() || !std::isdigit(data[pos])) bad("expected a number in header");
    std::size_t v = 0;
    while (pos < data.size() && std::isdigit(data[pos])) v = v * 10 + (data[pos++] - '0');
    return v;
  };
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6')) bad("not a binary PGM/PPM");
  const std::size_t channels = data[1] == '5' ? 1 : 3;
  pos = 2;
  PixelImage img;
  img.channels = channels;
  img.width = number();
  img.height = number();
  if (number() != 255) bad("only maxval 255 is supported");
  if (pos >= data.size() || !std::isspace(data[pos])) bad("malformed header");
  ++pos;
  const std::size_t n = img.width * img.height * channels;
  if (data.size() - pos < n) bad("pixel data truncated");
  img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                    data.begin() + static_cast<std::ptrdiff_t>(pos + n));
  img.validate();
  return img;
}

inline void write_netpbm(const std::filesystem::path& path, const PixelImage& img) {
  img.validate();
  bytes::Buffer out;
  const std::string header = std::string(img.channels == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  bytes::put_raw(out, header);
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  bytes::write_file(path, out);
}

}  // namespace ofclip
