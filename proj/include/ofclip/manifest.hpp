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

// Dataset manifests and the source registry.
//
// Manifest: UTF-8, one flat JSON object per line with keys
//   id (string), caption (string), image_path | features_path (string),
//   labels (optional list of strings), split (optional string).
// Registry: one JSON object per line with keys
//   source_id, manifest_path, preprocess ("chunks" | "none"),
//   invert_grayscale (optional bool).
// Relative paths resolve against the directory of the file naming them.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "ofclip/image.hpp"
#include "ofclip/linalg.hpp"
#include "ofclip/text.hpp"

namespace ofclip {

enum class Preprocess { Chunks, None };

struct ImageTextPair {
  std::string id;
  std::string source_id;
  std::string caption;      // text used for training (after preprocessing)
  std::string raw_caption;  // as read from the manifest
  std::filesystem::path image_path;     // raw pixels (PGM/PPM), or
  std::filesystem::path features_path;  // whitespace-separated floats
  std::vector<std::string> labels;
  std::string split;

  bool operator==(const ImageTextPair&) const = default;
};

struct DatasetManifest {
  std::string source_id;
  Preprocess preprocess = Preprocess::None;
  bool invert_grayscale = false;
  std::vector<ImageTextPair> records;

  std::size_t size() const noexcept { return records.size(); }
};

namespace detail {

[[noreturn]] inline void manifest_error(ErrorCode code, const std::filesystem::path& path, std::size_t line,
                                        const std::string& what) {
  fail(code, path.string() + ":" + std::to_string(line) + ": " + what);
}

inline std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      manifest_error(ErrorCode::ParseError, path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) manifest_error(ErrorCode::ParseError, path, line_no, "record is not an object");
    fn(j, line_no);
  }
}

inline std::string string_field(const nlohmann::json& j, const char* key, const std::filesystem::path& path,
                                std::size_t line, bool required) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) manifest_error(ErrorCode::MissingField, path, line, std::string("missing '") + key + "'");
    return {};
  }
  if (!it->is_string()) manifest_error(ErrorCode::ParseError, path, line, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace detail

inline DatasetManifest load_manifest(const std::filesystem::path& path, std::string source_id = {}) {
  DatasetManifest m;
  m.source_id = std::move(source_id);
  const auto base = path.parent_path();
  std::unordered_set<std::string> ids;
  detail::for_each_json_line(path, [&](const nlohmann::json& j, std::size_t line) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object() || (value.is_array() && key != "labels")) {
        detail::manifest_error(ErrorCode::ParseError, path, line, "field '" + key + "' is not flat");
      }
    }
    ImageTextPair r;
    r.source_id = m.source_id;
    r.id = detail::string_field(j, "id", path, line, true);
    r.raw_caption = detail::string_field(j, "caption", path, line, true);
    r.caption = r.raw_caption;
    const auto image = detail::string_field(j, "image_path", path, line, false);
    const auto features = detail::string_field(j, "features_path", path, line, false);
    if (image.empty() && features.empty()) {
      detail::manifest_error(ErrorCode::MissingField, path, line, "needs 'image_path' or 'features_path'");
    }
    if (!image.empty()) r.image_path = detail::resolve(base, image);
    if (!features.empty()) r.features_path = detail::resolve(base, features);
    r.split = detail::string_field(j, "split", path, line, false);
    if (auto it = j.find("labels"); it != j.end()) {
      if (!it->is_array()) detail::manifest_error(ErrorCode::ParseError, path, line, "'labels' must be a list");
      for (const auto& l : *it) {
        if (!l.is_string()) detail::manifest_error(ErrorCode::ParseError, path, line, "labels must be strings");
        r.labels.push_back(l.get<std::string>());
      }
    }
    if (r.id.empty()) detail::manifest_error(ErrorCode::MissingField, path, line, "'id' is empty");
    if (split_words(r.raw_caption).empty()) detail::manifest_error(ErrorCode::EmptyCaption, path, line, "caption is empty");
    if (!ids.insert(r.id).second) {
      detail::manifest_error(ErrorCode::DuplicateId, path, line, "duplicate id '" + r.id + "'");
    }
    m.records.push_back(std::move(r));
  });
  return m;
}

/// Replaces each caption by its noun chunks joined with ", ".
inline void apply_preprocess(DatasetManifest& m, const Lexicon& lexicon = Lexicon::builtin()) {
  if (m.preprocess != Preprocess::Chunks) return;
  for (auto& r : m.records) r.caption = chunk_caption(r.raw_caption, lexicon);
}

inline std::vector<DatasetManifest> load_registry(const std::filesystem::path& path,
                                                  const Lexicon& lexicon = Lexicon::builtin()) {
  std::vector<DatasetManifest> out;
  std::set<std::string> sources;
  const auto base = path.parent_path();
  detail::for_each_json_line(path, [&](const nlohmann::json& j, std::size_t line) {
    const auto source = detail::string_field(j, "source_id", path, line, true);
    const auto manifest = detail::string_field(j, "manifest_path", path, line, true);
    const auto mode = detail::string_field(j, "preprocess", path, line, false);
    if (source.empty()) detail::manifest_error(ErrorCode::MissingField, path, line, "'source_id' is empty");
    if (!sources.insert(source).second) {
      detail::manifest_error(ErrorCode::DuplicateId, path, line, "duplicate source '" + source + "'");
    }
    if (!mode.empty() && mode != "chunks" && mode != "none") {
      detail::manifest_error(ErrorCode::ParseError, path, line, "preprocess must be 'chunks' or 'none'");
    }
    DatasetManifest m = load_manifest(detail::resolve(base, manifest), source);
    m.preprocess = mode == "none" ? Preprocess::None : Preprocess::Chunks;
    if (auto it = j.find("invert_grayscale"); it != j.end()) {
      if (!it->is_boolean()) detail::manifest_error(ErrorCode::ParseError, path, line, "'invert_grayscale' must be a bool");
      m.invert_grayscale = it->get<bool>();
    }
    apply_preprocess(m, lexicon);
    out.push_back(std::move(m));
  });
  return out;
}

/// Writes records back as manifest lines. Paths are written as given.
inline void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& r : m.records) {
    nlohmann::json j;
    j["id"] = r.id;
    j["caption"] = r.caption;
    if (!r.image_path.empty()) j["image_path"] = r.image_path.string();
    if (!r.features_path.empty()) j["features_path"] = r.features_path.string();
    if (!r.labels.empty()) j["labels"] = r.labels;
    if (!r.split.empty()) j["split"] = r.split;
    out << j.dump() << "\n";
  }
}

inline Vec read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open features " + path.string());
  Vec v;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, path.string() + ": bad number '" + tok + "'");
    }
  }
  if (v.empty()) fail(ErrorCode::ParseError, path.string() + ": no feature values");
  if (!all_finite(v)) fail(ErrorCode::NonFinite, path.string() + ": non-finite feature");
  return v;
}

inline void write_feature_file(const std::filesystem::path& path, std::span<const double> v) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  out << "\n";
}

/// Input vector for the image head: the stored features, or the raw image
/// resized on its shortest edge and center-cropped to side x side.
inline Vec record_features(const ImageTextPair& r, std::size_t image_side, bool invert) {
  if (!r.features_path.empty()) return read_feature_file(r.features_path);
  return image_features(read_netpbm(r.image_path), image_side, invert);
}

}  // namespace ofclip
