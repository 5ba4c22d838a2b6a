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


// Trains the toy dual encoder and runs zero-shot garment classification with
// the single evaluation prompt and with the prompt-template ensemble.

#include <cstdio>

#include "ofclip/pipeline.hpp"
#include "ofclip/synthetic.hpp"

using namespace ofclip;

int main() {
  const auto data = synthetic::make_dataset({});

  TrainOptions opt;
  opt.steps = 300;
  const TrainResult run = train(data.registry, data.features, opt);
  std::printf("loss %.4f -> %.4f over %zu steps, temperature %.2f\n", run.history.front().total,
              run.history.back().total, run.history.size(), run.encoder.temperature());

  const DatasetManifest& catalog = data.registry[0];
  std::vector<Vec> rows;
  for (const auto& f : data.features[0]) rows.push_back(encode_image(f, run.encoder));
  const EmbeddingSet images{[&] {
                              std::vector<std::string> ids;
                              for (const auto& r : catalog.records) ids.push_back(r.id);
                              return ids;
                            }(),
                            Mat::from_rows(rows)};

  const auto labels = collect_labels(catalog, true);
  const auto embed = encoder_text_embedder(run.encoder, opt.tokenizer);
  const std::vector<std::size_t> ks = {1, 2};
  for (auto mode : {ClassPromptMode::Fixed, ClassPromptMode::TemplateEnsemble}) {
    const auto report = evaluate_classification(images, embed_labels(labels, embed, mode), catalog, ks);
    std::printf("%-9s acc@1 %6.2f  acc@2 %6.2f  weighted F1 %6.2f\n",
                mode == ClassPromptMode::Fixed ? "fixed" : "ensemble", 100 * report.metrics.at("acc@1"),
                100 * report.metrics.at("acc@2"), 100 * report.metrics.at("weighted_f1"));
  }
  return 0;
}
