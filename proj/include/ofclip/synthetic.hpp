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

// Seeded toy catalog: every item is a unique (color, material, garment)
// triple. Image features are a fixed random linear mix of the triple's
// one-hot codes plus Gaussian noise; captions name the triple in one of three
// source-specific styles.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ofclip/manifest.hpp"
#include "ofclip/rng.hpp"

namespace ofclip::synthetic {

inline constexpr std::array<const char*, 8> kColors = {"red", "blue", "green", "black",
                                                       "white", "yellow", "pink", "brown"};
inline constexpr std::array<const char*, 6> kMaterials = {"cotton", "denim", "silk", "wool", "leather", "linen"};
inline constexpr std::array<const char*, 4> kGarments = {"dress", "jacket", "skirt", "shirt"};

struct Options {
  std::uint64_t seed = 0;
  std::size_t feature_dim = 16;
  double noise = 0.05;
  std::array<std::size_t, 3> source_sizes = {96, 64, 32};  // at most 192 in total
};

struct Dataset {
  std::vector<DatasetManifest> registry;
  std::vector<std::vector<Vec>> features;  // [source][record]
};

inline std::size_t code_width() { return kColors.size() + kMaterials.size() + kGarments.size(); }

/// Registry with three sources: "catalog" (descriptive sentences, chunked),
/// "studio" (short phrases, chunked) and "attributes" (attribute lists, not
/// preprocessed). Labels are {garment, color, material}.
inline Dataset make_dataset(const Options& opt) {
  const std::size_t total = opt.source_sizes[0] + opt.source_sizes[1] + opt.source_sizes[2];
  const std::size_t combos = kColors.size() * kMaterials.size() * kGarments.size();
  if (total > combos) fail(ErrorCode::ConfigError, "synthetic catalog holds at most 192 unique items");

  SplitMix64 rng(opt.seed);
  Mat mix(opt.feature_dim, code_width());
  for (double& x : mix.data()) x = rng.normal();

  std::vector<std::size_t> order(combos);
  for (std::size_t i = 0; i < combos; ++i) order[i] = i;
  shuffle(std::span<std::size_t>(order), rng);

  static const std::array<const char*, 3> kSources = {"catalog", "studio", "attributes"};
  Dataset data;
  std::size_t next = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    DatasetManifest m;
    std::vector<Vec> features;
    m.source_id = kSources[s];
    m.preprocess = s == 2 ? Preprocess::None : Preprocess::Chunks;
    for (std::size_t k = 0; k < opt.source_sizes[s]; ++k, ++next) {
      const std::size_t code = order[next];
      const std::size_t c = code % kColors.size();
      const std::size_t mat = (code / kColors.size()) % kMaterials.size();
      const std::size_t g = code / (kColors.size() * kMaterials.size());
      Vec onehot(code_width(), 0.0);
      onehot[c] = 1.0;
      onehot[kColors.size() + mat] = 1.0;
      onehot[kColors.size() + kMaterials.size() + g] = 1.0;
      Vec f(opt.feature_dim, 0.0);
      for (std::size_t i = 0; i < opt.feature_dim; ++i) {
        for (std::size_t j = 0; j < onehot.size(); ++j) f[i] += mix(i, j) * onehot[j];
        f[i] += opt.noise * rng.normal();
      }

      ImageTextPair r;
      r.source_id = m.source_id;
      r.id = m.source_id + "-" + std::to_string(k);
      const std::string color = kColors[c], material = kMaterials[mat], garment = kGarments[g];
      switch (s) {
        case 0: r.raw_caption = "A " + color + " " + material + " " + garment + " with a relaxed fit."; break;
        case 1: r.raw_caption = "the " + color + " " + material + " " + garment; break;
        default: r.raw_caption = color + " " + material + " " + garment; break;
      }
      r.caption = r.raw_caption;
      r.labels = {garment, color, material};
      r.features_path = r.id + ".txt";
      m.records.push_back(std::move(r));
      features.push_back(std::move(f));
    }
    apply_preprocess(m);
    data.registry.push_back(std::move(m));
    data.features.push_back(std::move(features));
  }
  return data;
}

/// Writes feature files, one manifest per source (raw captions) and
/// registry.jsonl into `dir`. Returns the registry path.
inline std::filesystem::path write_dataset(const std::filesystem::path& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  std::ofstream reg(dir / "registry.jsonl");
  if (!reg) fail(ErrorCode::IoError, "cannot write registry in " + dir.string());
  for (std::size_t s = 0; s < data.registry.size(); ++s) {
    DatasetManifest m = data.registry[s];
    for (std::size_t k = 0; k < m.records.size(); ++k) {
      auto& r = m.records[k];
      write_feature_file(dir / r.features_path, data.features[s][k]);
      r.caption = r.raw_caption;
    }
    const std::string manifest = m.source_id + ".jsonl";
    write_manifest(dir / manifest, m);
    nlohmann::json j;
    j["source_id"] = m.source_id;
    j["manifest_path"] = manifest;
    j["preprocess"] = m.preprocess == Preprocess::Chunks ? "chunks" : "none";
    reg << j.dump() << "\n";
  }
  return dir / "registry.jsonl";
}

}  // namespace ofclip::synthetic
