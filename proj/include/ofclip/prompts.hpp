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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ofclip/encoder.hpp"
#include "ofclip/rng.hpp"
#include "ofclip/text.hpp"

namespace ofclip {

/// Fashion prompt prefixes. Index 0 is the generic "a photo of a" prompt used
/// for evaluation and for the fixed-prompt ablation.
class PromptTemplate {
 public:
  static const PromptTemplate& fashion() {
    static const PromptTemplate t({
        "a photo of a",
        "a photo of a nice",
        "a photo of a cool",
        "a photo of an expensive",
        "a good photo of a",
        "a bright photo of a",
        "a fashion studio shot of a",
        "a fashion magazine photo of a",
        "a fashion brochure photo of a",
        "a fashion catalog photo of a",
        "a fashion press photo of a",
        "a zalando photo of a",
        "a yoox photo of a",
        "a yoox web image of a",
        "an asos photo of a",
        "a high resolution photo of a",
        "a cropped photo of a",
        "a close-up photo of a",
        "a photo of one",
    });
    return t;
  }

  explicit PromptTemplate(std::vector<std::string> prompts) : prompts_(std::move(prompts)) {
    if (prompts_.empty()) fail(ErrorCode::ConfigError, "prompt template is empty");
    for (const auto& p : prompts_) {
      if (p.empty()) fail(ErrorCode::ConfigError, "prompt template contains an empty line");
    }
  }

  /// One prompt per line; blank lines are skipped, trailing CR is stripped.
  static PromptTemplate load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open prompt file " + path.string());
    std::vector<std::string> prompts;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) prompts.push_back(line);
    }
    return PromptTemplate(std::move(prompts));
  }

  std::size_t size() const noexcept { return prompts_.size(); }
  const std::string& operator[](std::size_t i) const { return prompts_.at(i); }
  const std::vector<std::string>& prompts() const noexcept { return prompts_; }

 private:
  std::vector<std::string> prompts_;
};

inline std::size_t sample_prompt(SplitMix64& rng, const PromptTemplate& tpl) {
  return static_cast<std::size_t>(rng.uniform_index(tpl.size()));
}

inline std::string render_prompt(const PromptTemplate& tpl, std::size_t index, std::string_view caption) {
  if (caption.empty()) fail(ErrorCode::EmptyCaption, "cannot render a prompt for an empty caption");
  return tpl[index] + " " + std::string(caption);
}

inline std::string render_prompt(std::size_t index, std::string_view caption) {
  return render_prompt(PromptTemplate::fashion(), index, caption);
}

enum class PromptMode { Fixed, Template };

inline std::string_view prompt_mode_name(PromptMode m) { return m == PromptMode::Fixed ? "fixed" : "template"; }

inline PromptMode parse_prompt_mode(std::string_view s) {
  if (s == "fixed") return PromptMode::Fixed;
  if (s == "template") return PromptMode::Template;
  fail(ErrorCode::ConfigError, "prompt mode must be 'fixed' or 'template', got '" + std::string(s) + "'");
}

inline std::uint64_t fnv1a_64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

/// Hash vocabulary: word -> 2 + fnv1a_64(word) mod (vocab - 2). Ids 0 and 1
/// are BOS and EOS.
struct Tokenizer {
  static constexpr std::uint32_t kBos = 0;
  static constexpr std::uint32_t kEos = 1;

  std::size_t vocab_size = 16384;
  std::size_t max_len = 77;

  void validate() const {
    if (vocab_size <= 2) fail(ErrorCode::ConfigError, "tokenizer vocab must exceed 2");
    if (max_len < 3) fail(ErrorCode::ConfigError, "tokenizer max_len must be >= 3");
  }

  std::uint32_t word_id(std::string_view word) const {
    return static_cast<std::uint32_t>(2 + fnv1a_64(word) % (vocab_size - 2));
  }

  std::vector<std::uint32_t> operator()(std::string_view text) const {
    validate();
    const auto words = split_words(text);
    if (words.empty()) fail(ErrorCode::EmptyText, "text has no tokens");
    std::vector<std::uint32_t> ids;
    ids.reserve(std::min(words.size() + 2, max_len));
    ids.push_back(kBos);
    for (const auto& w : words) {
      if (ids.size() + 1 >= max_len) break;
      ids.push_back(word_id(w));
    }
    ids.push_back(kEos);
    return ids;
  }
};

inline std::vector<std::uint32_t> tokenize(std::string_view text, const Tokenizer& tk = {}) { return tk(text); }

/// Maps a rendered prompt string to a (not necessarily unit) text embedding.
using TextEmbedder = std::function<Vec(const std::string&)>;

inline TextEmbedder encoder_text_embedder(const DualEncoder& enc, Tokenizer tk) {
  return [&enc, tk](const std::string& text) { return encode_text(tk(text), enc); };
}

enum class ClassPromptMode { Fixed, TemplateEnsemble };

/// One unit row per label, in label order. Fixed mode embeds
/// "a photo of a {label}"; ensemble mode averages the unit embeddings over
/// every prompt in the template and re-normalizes.
inline Mat build_class_embeddings(std::span<const std::string> labels, const TextEmbedder& embed,
                                  ClassPromptMode mode = ClassPromptMode::Fixed,
                                  const PromptTemplate& tpl = PromptTemplate::fashion()) {
  if (labels.empty()) fail(ErrorCode::EmptyLabelSet, "no class labels");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) fail(ErrorCode::DuplicateLabel, "label '" + l + "' appears twice");
  }
  std::vector<Vec> rows;
  rows.reserve(labels.size());
  for (const auto& label : labels) {
    if (mode == ClassPromptMode::Fixed) {
      rows.push_back(l2_normalize(embed(render_prompt(tpl, 0, label))));
      continue;
    }
    Vec acc;
    for (std::size_t p = 0; p < tpl.size(); ++p) {
      const Vec e = l2_normalize(embed(render_prompt(tpl, p, label)));
      if (acc.empty()) acc.assign(e.size(), 0.0);
      if (e.size() != acc.size()) fail(ErrorCode::DimMismatch, "text embeddings differ in width");
      for (std::size_t j = 0; j < e.size(); ++j) acc[j] += e[j];
    }
    for (double& x : acc) x /= static_cast<double>(tpl.size());
    rows.push_back(l2_normalize(acc));
  }
  return Mat::from_rows(rows);
}

}  // namespace ofclip
