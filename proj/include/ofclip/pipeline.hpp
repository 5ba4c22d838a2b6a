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

// End-to-end glue: registry -> stratified batches -> prompted, tokenized
// examples -> training; and embeddings -> evaluation reports.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ofclip/checkpoint.hpp"
#include "ofclip/embedding_file.hpp"
#include "ofclip/manifest.hpp"
#include "ofclip/metrics.hpp"
#include "ofclip/prompts.hpp"
#include "ofclip/report.hpp"
#include "ofclip/sampler.hpp"
#include "ofclip/trainer.hpp"

namespace ofclip {

// Sub-stream identifiers for derive_seed.
inline constexpr std::uint64_t kEncoderStream = 1;
inline constexpr std::uint64_t kSamplerStream = 2;
inline constexpr std::uint64_t kPromptStream = 3;

struct TrainOptions {
  TrainConfig config;
  PromptMode prompt_mode = PromptMode::Template;
  EncoderDims dims;
  Tokenizer tokenizer{4096, 77};
  std::size_t image_side = 4;  // raw-pixel records: side of the center crop
  std::uint64_t steps = 0;     // 0 = config.epochs full passes
};

struct TrainResult {
  DualEncoder encoder;
  AdamWState optimizer;
  std::vector<LossBreakdown> history;  // one entry per step, pre-update loss
};

/// Feature vectors for every record, indexed like the registry.
inline std::vector<std::vector<Vec>> load_registry_features(std::span<const DatasetManifest> registry,
                                                            std::size_t image_side) {
  std::vector<std::vector<Vec>> out(registry.size());
  for (std::size_t s = 0; s < registry.size(); ++s) {
    out[s].reserve(registry[s].size());
    for (const auto& r : registry[s].records) {
      out[s].push_back(record_features(r, image_side, registry[s].invert_grayscale));
    }
  }
  return out;
}

/// Prompt each caption (fixed: template index 0; template: uniform draw per
/// pair) and tokenize it.
inline std::vector<TrainingExample> make_examples(const Batch& batch, std::span<const DatasetManifest> registry,
                                                  const std::vector<std::vector<Vec>>& features, PromptMode mode,
                                                  const Tokenizer& tk, SplitMix64& prompt_rng,
                                                  const PromptTemplate& tpl = PromptTemplate::fashion()) {
  std::vector<TrainingExample> out;
  out.reserve(batch.size());
  for (const auto& ref : batch.items) {
    const auto& rec = registry[ref.source].records[ref.record];
    const std::size_t p = mode == PromptMode::Fixed ? 0 : sample_prompt(prompt_rng, tpl);
    out.push_back({features[ref.source][ref.record], tk(render_prompt(tpl, p, rec.caption))});
  }
  return out;
}

/// Trains a freshly initialized encoder on preloaded features
/// ([source][record]). Deterministic for a fixed seed.
inline TrainResult train(std::span<const DatasetManifest> registry, const std::vector<std::vector<Vec>>& features,
                         const TrainOptions& opt) {
  opt.config.validate();
  opt.tokenizer.validate();
  if (features.size() != registry.size()) fail(ErrorCode::ShapeMismatch, "features do not cover the registry");
  EncoderDims dims = opt.dims;
  dims.vocab = opt.tokenizer.vocab_size;
  for (const auto& src : features) {
    for (const auto& f : src) {
      if (f.size() != dims.image_in) {
        fail(ErrorCode::DimMismatch, "record features have width " + std::to_string(f.size()) +
                                         ", encoder expects " + std::to_string(dims.image_in));
      }
    }
  }

  const std::uint64_t seed = opt.config.seed;
  TrainResult result;
  result.encoder = DualEncoder::initialize(dims, derive_seed(seed, kEncoderStream));
  StratifiedSampler sampler(registry, opt.config.batch_size, derive_seed(seed, kSamplerStream));
  SplitMix64 prompt_rng(derive_seed(seed, kPromptStream));
  const std::uint64_t steps =
      opt.steps ? opt.steps : static_cast<std::uint64_t>(opt.config.epochs) * sampler.batches_per_epoch();

  for (std::uint64_t step = 0; step < steps; ++step) {
    Batch batch = sampler.next();
    if (batch.size() < 2) continue;  // a one-pair tail has no negatives
    const auto examples = make_examples(batch, registry, features, opt.prompt_mode, opt.tokenizer, prompt_rng);
    result.history.push_back(train_step(result.encoder, examples, result.optimizer, opt.config));
  }
  return result;
}

inline TrainResult train(std::span<const DatasetManifest> registry, const TrainOptions& opt) {
  return train(registry, load_registry_features(registry, opt.image_side), opt);
}

/// Embedding source for class prompts backed by an exported text file. Ids
/// are looked up as the full rendered prompt first, then as the bare label
/// (exports rendered with the fixed prompt usually key by label).
inline TextEmbedder exported_text_embedder(const EmbeddingSet& set) {
  auto index = std::make_shared<std::unordered_map<std::string, std::size_t>>(set.index());
  const std::string fixed_prefix = PromptTemplate::fashion()[0] + " ";
  return [&set, index, fixed_prefix](const std::string& text) -> Vec {
    if (auto it = index->find(text); it != index->end()) return set.vectors.row_vec(it->second);
    if (text.rfind(fixed_prefix, 0) == 0) {
      if (auto it = index->find(text.substr(fixed_prefix.size())); it != index->end()) {
        return set.vectors.row_vec(it->second);
      }
    }
    fail(ErrorCode::MissingField, "no exported text embedding for '" + text + "'");
  };
}

/// Embeds records with a trained encoder. Returned ids are the record ids.
inline EmbeddingSet embed_images(const DualEncoder& enc, const DatasetManifest& m, std::size_t image_side) {
  EmbeddingSet out;
  std::vector<Vec> rows;
  for (const auto& r : m.records) {
    out.ids.push_back(r.id);
    rows.push_back(encode_image(record_features(r, image_side, m.invert_grayscale), enc));
  }
  out.vectors = rows.empty() ? Mat(0, enc.image_weight.cols()) : Mat::from_rows(rows);
  return out;
}

/// Ensemble mode averages the unit caption embeddings over every prompt.
inline EmbeddingSet embed_captions(const DualEncoder& enc, const DatasetManifest& m, const Tokenizer& tk,
                                   ClassPromptMode mode = ClassPromptMode::Fixed,
                                   const PromptTemplate& tpl = PromptTemplate::fashion()) {
  EmbeddingSet out;
  std::vector<Vec> rows;
  for (const auto& r : m.records) {
    out.ids.push_back(r.id);
    if (mode == ClassPromptMode::Fixed) {
      rows.push_back(encode_text(tk(render_prompt(tpl, 0, r.caption)), enc));
      continue;
    }
    Vec acc(enc.text_weight.cols(), 0.0);
    for (std::size_t p = 0; p < tpl.size(); ++p) {
      const Vec e = encode_text(tk(render_prompt(tpl, p, r.caption)), enc);
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += e[j];
    }
    rows.push_back(l2_normalize(acc));
  }
  out.vectors = rows.empty() ? Mat(0, enc.image_weight.cols()) : Mat::from_rows(rows);
  return out;
}

inline EmbeddingSet embed_labels(std::span<const std::string> labels, const TextEmbedder& embed,
                                 ClassPromptMode mode) {
  return {std::vector<std::string>(labels.begin(), labels.end()), build_class_embeddings(labels, embed, mode)};
}

/// Distinct labels over the manifest, in first-seen order.
inline std::vector<std::string> collect_labels(const DatasetManifest& m, bool first_only) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : m.records) {
    for (std::size_t i = 0; i < r.labels.size() && (!first_only || i == 0); ++i) {
      if (seen.insert(r.labels[i]).second) out.push_back(r.labels[i]);
    }
  }
  return out;
}

namespace detail {

inline const ImageTextPair& record_for(const std::unordered_map<std::string, const ImageTextPair*>& by_id,
                                       const std::string& id) {
  auto it = by_id.find(id);
  if (it == by_id.end()) fail(ErrorCode::MissingTruth, "no manifest record for '" + id + "'");
  return *it->second;
}

inline std::unordered_map<std::string, const ImageTextPair*> records_by_id(const DatasetManifest& m) {
  std::unordered_map<std::string, const ImageTextPair*> out;
  for (const auto& r : m.records) out.emplace(r.id, &r);
  return out;
}

inline std::string k_suffix(std::size_t k) { return "@" + std::to_string(k); }

}  // namespace detail

/// Single-label zero-shot classification. Truth is each record's first label.
inline EvalReport evaluate_classification(const EmbeddingSet& images, const EmbeddingSet& classes,
                                          const DatasetManifest& truth_manifest, std::span<const std::size_t> ks) {
  if (classes.size() == 0) fail(ErrorCode::EmptyLabelSet, "no class embeddings");
  if (images.dim() != classes.dim()) fail(ErrorCode::DimMismatch, "image and class embeddings differ in width");
  const auto by_id = detail::records_by_id(truth_manifest);
  const auto class_index = classes.index();
  std::vector<std::size_t> truth;
  for (const auto& id : images.ids) {
    const auto& rec = detail::record_for(by_id, id);
    if (rec.labels.empty()) fail(ErrorCode::MissingTruth, "record '" + id + "' has no label");
    auto it = class_index.find(rec.labels.front());
    if (it == class_index.end()) fail(ErrorCode::MissingTruth, "label '" + rec.labels.front() + "' is not a class");
    truth.push_back(it->second);
  }
  const auto preds = zero_shot_rank_all(images.vectors, classes.vectors);
  EvalReport r;
  r.task = "classify";
  for (auto k : ks) r.metrics["acc" + detail::k_suffix(k)] = accuracy_at_k(preds, truth, k);
  if (!preds.empty()) r.metrics["weighted_f1"] = weighted_f1(preds, truth);
  r.counts["queries"] = images.size();
  r.counts["classes"] = classes.size();
  return r;
}

/// Multi-label attribute recognition. Truth is each record's full label set;
/// records without labels are excluded and counted.
inline EvalReport evaluate_attributes(const EmbeddingSet& images, const EmbeddingSet& attributes,
                                      const DatasetManifest& truth_manifest, std::span<const std::size_t> ks) {
  if (attributes.size() == 0) fail(ErrorCode::EmptyLabelSet, "no attribute embeddings");
  if (images.dim() != attributes.dim()) fail(ErrorCode::DimMismatch, "image and attribute embeddings differ in width");
  const auto by_id = detail::records_by_id(truth_manifest);
  const auto attr_index = attributes.index();
  std::vector<std::set<std::size_t>> truth;
  for (const auto& id : images.ids) {
    std::set<std::size_t> t;
    for (const auto& l : detail::record_for(by_id, id).labels) {
      auto it = attr_index.find(l);
      if (it == attr_index.end()) fail(ErrorCode::MissingTruth, "label '" + l + "' is not an attribute");
      t.insert(it->second);
    }
    truth.push_back(std::move(t));
  }
  const auto preds = zero_shot_rank_all(images.vectors, attributes.vectors);
  EvalReport r;
  r.task = "attributes";
  MultilabelRecall last;
  for (auto k : ks) {
    last = multilabel_recall_at_k(preds, truth, k);
    r.metrics["overall_recall" + detail::k_suffix(k)] = last.overall;
    r.metrics["per_class_recall" + detail::k_suffix(k)] = last.per_class_mean;
  }
  r.counts["queries"] = last.evaluated_queries;
  r.counts["excluded_queries"] = last.excluded_queries;
  r.counts["attributes"] = attributes.size();
  r.counts["evaluated_attributes"] = last.evaluated_classes;
  r.counts["excluded_attributes"] = attributes.size() - last.evaluated_classes;
  return r;
}

/// Paired cross-modal retrieval; image and text records join on id.
inline EvalReport evaluate_retrieval(const EmbeddingSet& images, const EmbeddingSet& texts,
                                     std::span<const std::size_t> ks) {
  if (images.dim() != texts.dim()) fail(ErrorCode::DimMismatch, "image and text embeddings differ in width");
  const auto text_index = texts.index();
  Mat text_rows(images.size(), texts.dim());
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto it = text_index.find(images.ids[i]);
    if (it == text_index.end()) fail(ErrorCode::EmptyRelevance, "no text paired with image '" + images.ids[i] + "'");
    const auto src = texts.vectors.row(it->second);
    std::copy(src.begin(), src.end(), text_rows.row(i).begin());
  }
  const auto rel = paired_relevance(images.size());
  EvalReport r;
  r.task = "retrieve";
  for (auto k : ks) {
    r.metrics["i2t_r" + detail::k_suffix(k)] =
        retrieval_recall_at_k(images.vectors, text_rows, rel, k, RetrievalDirection::ImageToText);
    r.metrics["t2i_r" + detail::k_suffix(k)] =
        retrieval_recall_at_k(images.vectors, text_rows, rel, k, RetrievalDirection::TextToImage);
  }
  r.counts["queries"] = images.size();
  r.counts["unpaired_texts"] = texts.size() - images.size();
  return r;
}

}  // namespace ofclip
