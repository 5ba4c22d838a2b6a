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


// ofclip command-line tool: synthetic data, training, embedding export,
// zero-shot evaluation, caption preprocessing and format inspection.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ofclip/checkpoint.hpp"
#include "ofclip/embedding_file.hpp"
#include "ofclip/pipeline.hpp"
#include "ofclip/synthetic.hpp"

using namespace ofclip;

namespace {

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) fail(ErrorCode::ConfigError, std::string(what) + ": bad entry '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) fail(ErrorCode::ConfigError, std::string(what) + " is empty");
  return out;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  auto ks = parse_list(text, "--k");
  for (auto k : ks)
    if (k == 0) fail(ErrorCode::ConfigError, "--k values must be >= 1");
  return ks;
}

Preprocess parse_preprocess(const std::string& s) {
  if (s == "chunks") return Preprocess::Chunks;
  if (s == "none") return Preprocess::None;
  fail(ErrorCode::ConfigError, "--preprocess must be 'chunks' or 'none'");
}

ClassPromptMode class_mode(PromptMode m) {
  return m == PromptMode::Fixed ? ClassPromptMode::Fixed : ClassPromptMode::TemplateEnsemble;
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

Tokenizer tokenizer_for(const DualEncoder& enc) { return Tokenizer{enc.dims().vocab, 77}; }

// ---- synth ----

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  std::string sizes = "96,64,32";
  std::size_t feature_dim = 16;
  double noise = 0.05;
};

void run_synth(const SynthArgs& a) {
  synthetic::Options opt;
  opt.seed = a.seed;
  opt.feature_dim = a.feature_dim;
  opt.noise = a.noise;
  const auto sizes = parse_list(a.sizes, "--sizes");
  if (sizes.size() != 3) fail(ErrorCode::ConfigError, "--sizes needs three comma-separated counts");
  std::copy(sizes.begin(), sizes.end(), opt.source_sizes.begin());
  const auto path = synthetic::write_dataset(a.out, synthetic::make_dataset(opt));
  std::cout << "wrote " << path.string() << "\n";
}

// ---- train ----

struct TrainArgs {
  std::string registry;
  std::string out;
  std::string report;
  std::string prompt_mode = "template";
  TrainConfig config;
  std::uint64_t steps = 0;
  std::size_t image_side = 4;
  std::size_t embed = 8;
  std::size_t token_dim = 16;
  std::size_t vocab = 4096;
};

void run_train(const TrainArgs& a) {
  TrainOptions opt;
  opt.config = a.config;
  opt.prompt_mode = parse_prompt_mode(a.prompt_mode);
  opt.steps = a.steps;
  opt.image_side = a.image_side;
  opt.dims.embed = a.embed;
  opt.dims.token_dim = a.token_dim;
  opt.tokenizer = Tokenizer{a.vocab, 77};
  const auto registry = load_registry(a.registry);
  const auto features = load_registry_features(registry, a.image_side);
  for (const auto& src : features) {
    if (!src.empty()) {
      opt.dims.image_in = src.front().size();
      break;
    }
  }
  const auto result = train(registry, features, opt);
  save_checkpoint(a.out, result.encoder);

  const double first = result.history.empty() ? 0.0 : result.history.front().total;
  const double last = result.history.empty() ? 0.0 : result.history.back().total;
  if (!a.report.empty()) {
    EvalReport r;
    r.task = "train";
    r.tags["prompt_mode"] = std::string(prompt_mode_name(opt.prompt_mode));
    r.tags["seed"] = std::to_string(opt.config.seed);
    r.tags["initial_loss"] = fixed6(first);
    r.tags["final_loss"] = fixed6(last);
    r.tags["temperature"] = fixed6(result.encoder.temperature());
    r.counts["steps"] = result.history.size();
    std::size_t pairs = 0;
    for (const auto& m : registry) pairs += m.size();
    r.counts["pairs"] = pairs;
    write_report(a.report, r);
  }
  std::cout << "trained " << result.history.size() << " steps, loss " << fixed6(first) << " -> " << fixed6(last)
            << ", checkpoint " << a.out << "\n";
}

// ---- export ----

struct ExportArgs {
  std::string checkpoint;
  std::string manifest;
  std::string modality = "image";
  std::string prompt_mode = "fixed";
  std::string out;
  std::string preprocess = "none";
  std::size_t image_side = 4;
  bool invert = false;
  std::string labels;  // empty: captions; first|all: distinct labels
};

DatasetManifest load_for_eval(const std::string& path, const std::string& preprocess, bool invert) {
  DatasetManifest m = load_manifest(path);
  m.preprocess = parse_preprocess(preprocess);
  m.invert_grayscale = invert;
  apply_preprocess(m);
  return m;
}

void run_export(const ExportArgs& a) {
  const DualEncoder enc = load_checkpoint(a.checkpoint);
  const DatasetManifest m = load_for_eval(a.manifest, a.preprocess, a.invert);
  const PromptMode mode = parse_prompt_mode(a.prompt_mode);
  EmbeddingSet set;
  if (a.modality == "image") {
    set = embed_images(enc, m, a.image_side);
  } else if (a.modality == "text") {
    const Tokenizer tk = tokenizer_for(enc);
    if (!a.labels.empty()) {
      if (a.labels != "first" && a.labels != "all") fail(ErrorCode::ConfigError, "--labels must be 'first' or 'all'");
      const auto labels = collect_labels(m, a.labels == "first");
      set = embed_labels(labels, encoder_text_embedder(enc, tk), class_mode(mode));
    } else {
      set = embed_captions(enc, m, tk, class_mode(mode));
    }
  } else {
    fail(ErrorCode::ConfigError, "--modality must be 'image' or 'text'");
  }
  write_embeddings(a.out, set.ids, set.vectors);
  std::cout << "wrote " << set.size() << " x " << set.dim() << " to " << a.out << "\n";
}

// ---- eval ----

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string images;
  std::string classes;  // classes or attributes file
  std::string texts;
  std::string k = "1,5,10";
  std::string report;
  std::string prompt_mode = "fixed";
  std::string preprocess = "none";
  std::size_t image_side = 4;
  bool invert = false;
};

void run_eval(const std::string& task, const EvalArgs& a) {
  const auto ks = parse_ks(a.k);
  const PromptMode mode = parse_prompt_mode(a.prompt_mode);
  const bool from_checkpoint = !a.checkpoint.empty();
  if (!from_checkpoint && a.images.empty()) {
    fail(ErrorCode::ConfigError, "eval needs --checkpoint or --images");
  }
  if ((from_checkpoint || task != "retrieve") && a.manifest.empty()) {
    fail(ErrorCode::ConfigError, "eval " + task + " needs --manifest");
  }
  DatasetManifest m;
  if (!a.manifest.empty()) m = load_for_eval(a.manifest, a.preprocess, a.invert);

  DualEncoder enc;
  if (from_checkpoint) enc = load_checkpoint(a.checkpoint);
  const EmbeddingSet images = from_checkpoint ? embed_images(enc, m, a.image_side) : read_embeddings(a.images);

  auto label_set = [&](bool first_only) {
    if (!a.classes.empty()) return read_embeddings(a.classes);
    if (!from_checkpoint) fail(ErrorCode::ConfigError, "eval " + task + " needs --classes or --checkpoint");
    const auto labels = collect_labels(m, first_only);
    return embed_labels(labels, encoder_text_embedder(enc, tokenizer_for(enc)), class_mode(mode));
  };

  EvalReport r;
  if (task == "classify") {
    r = evaluate_classification(images, label_set(true), m, ks);
  } else if (task == "attributes") {
    r = evaluate_attributes(images, label_set(false), m, ks);
  } else {
    EmbeddingSet texts;
    if (!a.texts.empty()) {
      texts = read_embeddings(a.texts);
    } else if (from_checkpoint) {
      texts = embed_captions(enc, m, tokenizer_for(enc), class_mode(mode));
    } else {
      fail(ErrorCode::ConfigError, "eval retrieve needs --texts or --checkpoint");
    }
    r = evaluate_retrieval(images, texts, ks);
  }
  r.tags["prompt_mode"] = std::string(prompt_mode_name(mode));
  r.tags["embeddings"] = from_checkpoint ? "checkpoint" : "files";
  std::cout << r.to_text();
  if (!a.report.empty()) write_report(a.report, r);
}

// ---- preprocess / format ----

void run_preprocess(const std::string& in, const std::string& out, const std::string& lexicon) {
  DatasetManifest m = load_manifest(in);
  m.preprocess = Preprocess::Chunks;
  apply_preprocess(m, lexicon.empty() ? Lexicon::builtin() : Lexicon::load(lexicon));
  write_manifest(out, m);
  std::cout << "wrote " << m.size() << " records to " << out << "\n";
}

void run_inspect(const std::string& path, bool verify) {
  const auto h = inspect_embeddings(path);
  if (verify) read_embeddings(path);
  std::cout << "magic OFCE version " << h.version << " dim " << h.dim << " count " << h.count
            << (verify ? " verified" : "") << "\n";
}

std::string single_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ofclip: contrastive fashion image-text training and zero-shot evaluation"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "write the seeded three-source toy dataset");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--seed", synth.seed);
  s->add_option("--sizes", synth.sizes, "records per source, e.g. 96,64,32");
  s->add_option("--feature-dim", synth.feature_dim);
  s->add_option("--noise", synth.noise);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a dual encoder on a registry");
  t->add_option("--registry", tr.registry, "registry.jsonl")->required();
  t->add_option("--out", tr.out, "checkpoint path")->required();
  t->add_option("--report", tr.report, "training summary report");
  t->add_option("--prompt-mode", tr.prompt_mode, "fixed|template");
  t->add_option("--seed", tr.config.seed);
  t->add_option("--lr", tr.config.lr);
  t->add_option("--beta1", tr.config.beta1);
  t->add_option("--beta2", tr.config.beta2);
  t->add_option("--eps", tr.config.eps);
  t->add_option("--weight-decay", tr.config.weight_decay);
  t->add_option("--epochs", tr.config.epochs);
  t->add_option("--batch-size", tr.config.batch_size);
  t->add_option("--steps", tr.steps, "optimizer steps; 0 runs --epochs full passes");
  t->add_option("--image-side", tr.image_side, "crop side for raw-pixel records");
  t->add_option("--embed-dim", tr.embed);
  t->add_option("--token-dim", tr.token_dim);
  t->add_option("--vocab", tr.vocab);

  ExportArgs ex;
  auto* e = app.add_subcommand("export", "write embeddings of a manifest with a checkpoint");
  e->add_option("--checkpoint", ex.checkpoint)->required();
  e->add_option("--manifest", ex.manifest)->required();
  e->add_option("--modality", ex.modality, "image|text");
  e->add_option("--prompt-mode", ex.prompt_mode, "fixed|template");
  e->add_option("--out", ex.out)->required();
  e->add_option("--preprocess", ex.preprocess, "chunks|none");
  e->add_option("--image-side", ex.image_side);
  e->add_flag("--invert-grayscale", ex.invert);
  e->add_option("--labels", ex.labels, "first|all: embed distinct labels instead of captions");

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "zero-shot evaluation");
  v->require_subcommand(1);
  const std::pair<const char*, const char*> tasks[] = {
      {"classify", "single-label accuracy@k and weighted F1"},
      {"attributes", "multi-label overall and per-class recall@k"},
      {"retrieve", "image-to-text and text-to-image recall@k"}};
  for (const auto& [task, about] : tasks) {
    auto* sub = v->add_subcommand(task, about);
    sub->add_option("--checkpoint", ev.checkpoint);
    sub->add_option("--manifest", ev.manifest);
    sub->add_option("--images", ev.images, "image embedding file");
    if (std::string(task) == "retrieve") {
      sub->add_option("--texts", ev.texts, "text embedding file");
    } else {
      sub->add_option("--classes", ev.classes, "label embedding file");
    }
    sub->add_option("--k", ev.k, "comma-separated cutoffs");
    sub->add_option("--report", ev.report);
    sub->add_option("--prompt-mode", ev.prompt_mode, "fixed|template");
    sub->add_option("--preprocess", ev.preprocess, "chunks|none");
    sub->add_option("--image-side", ev.image_side);
    sub->add_flag("--invert-grayscale", ev.invert);
  }

  std::string pre_in, pre_out, pre_lex;
  auto* p = app.add_subcommand("preprocess", "chunk manifest captions into noun phrases");
  p->add_option("--manifest", pre_in)->required();
  p->add_option("--out", pre_out)->required();
  p->add_option("--lexicon", pre_lex);

  std::string fmt_path;
  bool fmt_verify = false;
  auto* f = app.add_subcommand("format", "embedding file utilities");
  f->require_subcommand(1);
  auto* fi = f->add_subcommand("inspect", "print the header");
  fi->add_option("file", fmt_path)->required();
  fi->add_flag("--verify", fmt_verify, "also read and validate every record");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    std::cerr << "error: ConfigError: " << single_line(err.what()) << "\n";
    return exit_status(ErrorCode::ConfigError);
  }

  try {
    if (*s) run_synth(synth);
    if (*t) run_train(tr);
    if (*e) run_export(ex);
    if (*v) {
      for (const char* task : {"classify", "attributes", "retrieve"})
        if (*v->get_subcommand(task)) run_eval(task, ev);
    }
    if (*p) run_preprocess(pre_in, pre_out, pre_lex);
    if (*fi) run_inspect(fmt_path, fmt_verify);
  } catch (const Error& err) {
    std::cerr << "error: " << single_line(err.what()) << "\n";
    return exit_status(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: IoError: " << single_line(err.what()) << "\n";
    return exit_status(ErrorCode::IoError);
  }
  return 0;
}
