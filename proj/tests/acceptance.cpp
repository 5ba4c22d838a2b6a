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


// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "metric_suite.hpp"
#include "ofclip/checkpoint.hpp"
#include "ofclip/embedding_file.hpp"
#include "ofclip/loss.hpp"
#include "ofclip/pipeline.hpp"
#include "ofclip/synthetic.hpp"
#include "oracles.hpp"

using namespace ofclip;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1 ----

Outcome loss_closed_forms() {
  SplitMix64 rng(1);
  double worst_uniform = 0.0;
  for (std::size_t l = 2; l <= 64; ++l) {
    const Mat u = oracle::random_unit_rows(l, 1 + rng.uniform_index(16), rng);
    const Mat v = oracle::random_unit_rows(l, u.cols(), rng);
    const double total = contrastive_loss(u, v, 0.0).total;
    worst_uniform = std::max(worst_uniform, std::abs(total - 2.0 * std::log(static_cast<double>(l))));
  }
  const Mat eye = Mat::identity(2);
  const double pair = contrastive_loss(eye, eye, 1.0).total;
  const double expected = 2.0 * std::log(1.0 + std::exp(-1.0));
  const double err = std::abs(pair - expected);
  return {worst_uniform <= 1e-9 && err <= 1e-9 && std::abs(pair - 0.626524) < 1e-6,
          "tau=0 max |total-2lnL| over L=2..64 " + fmt("%.3g", worst_uniform) + "; L=2 tau=1 total " +
              fmt("%.9f", pair) + " (err " + fmt("%.3g", err) + ")"};
}

// ---- 2 ----

Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  SplitMix64 rng(20240);
  double worst = 0.0;
  std::size_t components = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t l = 2 + rng.uniform_index(15), d = 2 + rng.uniform_index(31);
    double s = rng.uniform(-1.0, 3.0);
    Mat u = oracle::random_unit_rows(l, d, rng), v = oracle::random_unit_rows(l, d, rng);
    const auto g = contrastive_grad(u, v, s);
    const auto f = [&] { return contrastive_loss(u, v, std::exp(s)).total; };
    for (std::size_t i = 0; i < u.size(); ++i, ++components)
      worst = std::max(worst, oracle::relative_error(g.d_text.data()[i], oracle::central_difference(f, u.data()[i], 1e-5)));
    for (std::size_t i = 0; i < v.size(); ++i, ++components)
      worst = std::max(worst, oracle::relative_error(g.d_image.data()[i], oracle::central_difference(f, v.data()[i], 1e-5)));
    worst = std::max(worst, oracle::relative_error(g.d_log_scale, oracle::central_difference(f, s, 1e-5)));
    ++components;
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && t < 10.0, "100 instances, " + std::to_string(components) + " components, max rel err " +
                                        fmt("%.3g", worst) + ", " + fmt("%.2f", t) + " s"};
}

// ---- 3 ----

Outcome metric_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = oracle::run_random_suite(31337, 1000);
  const double t = seconds_since(t0);
  return {r.ok() && t < 30.0, std::to_string(r.instances) + " instances, " + std::to_string(r.comparisons) +
                                  " comparisons, " + std::to_string(r.mismatches) + " mismatches, " +
                                  fmt("%.2f", t) + " s" + (r.first_failure.empty() ? "" : "; " + r.first_failure)};
}

// ---- 4 ----

struct ToyRun {
  TrainResult result;
  double t2i_r1 = 0.0;
  double t2i_r1_init = 0.0;
};

double t2i_recall_at_1(const DualEncoder& enc, const synthetic::Dataset& data, const Tokenizer& tk) {
  std::vector<Vec> imgs, txts;
  for (std::size_t s = 0; s < data.registry.size(); ++s) {
    for (std::size_t k = 0; k < data.registry[s].size(); ++k) {
      imgs.push_back(encode_image(data.features[s][k], enc));
      txts.push_back(encode_text(tk(render_prompt(0, data.registry[s].records[k].caption)), enc));
    }
  }
  const Mat i = Mat::from_rows(imgs), t = Mat::from_rows(txts);
  return retrieval_recall_at_k(i, t, paired_relevance(i.rows()), 1, RetrievalDirection::TextToImage);
}

ToyRun toy_run(const synthetic::Dataset& data) {
  TrainOptions opt;
  opt.config.lr = 1e-3;
  opt.config.seed = 0;
  opt.prompt_mode = PromptMode::Template;
  opt.steps = 300;
  opt.dims.image_in = 16;
  opt.dims.embed = 8;
  ToyRun run;
  run.t2i_r1_init = t2i_recall_at_1(DualEncoder::initialize({16, 8, opt.tokenizer.vocab_size, opt.dims.token_dim},
                                                            derive_seed(0, kEncoderStream)),
                                    data, opt.tokenizer);
  run.result = train(data.registry, data.features, opt);
  run.t2i_r1 = t2i_recall_at_1(run.result.encoder, data, opt.tokenizer);
  return run;
}

Outcome toy_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  synthetic::Options so;
  so.seed = 0;
  const auto data = synthetic::make_dataset(so);
  std::size_t pairs = 0;
  for (const auto& m : data.registry) pairs += m.size();
  const ToyRun a = toy_run(data);
  const ToyRun b = toy_run(data);
  const double t = seconds_since(t0);
  const bool same = serialize_checkpoint(encoder_tensors(a.result.encoder)) ==
                    serialize_checkpoint(encoder_tensors(b.result.encoder));
  const double first = a.result.history.front().total, last = a.result.history.back().total;
  const bool pass = pairs == 192 && a.result.history.size() == 300 && a.t2i_r1 >= 0.90 && last <= 0.5 * first &&
                    same && t < 60.0;
  return {pass, std::to_string(pairs) + " pairs, 300 steps: T2I R@1 " + fmt("%.4f", a.t2i_r1_init) + " -> " +
                    fmt("%.4f", a.t2i_r1) + ", loss " + fmt("%.4f", first) + " -> " + fmt("%.4f", last) + " (ratio " +
                    fmt("%.4f", last / first) + "), rerun " + (same ? "identical" : "DIFFERS") + ", " +
                    fmt("%.2f", t) + " s for two runs"};
}

// ---- 5 ----

Outcome sampler_contract() {
  std::vector<DatasetManifest> reg;
  for (std::size_t n : {100u, 10u, 10u}) {
    DatasetManifest m;
    m.source_id = "source" + std::to_string(reg.size());
    m.records.resize(n);
    reg.push_back(m);
  }
  StratifiedSampler sampler(reg, 12, 0);
  bool mixed = true, covered = true;
  std::size_t batches = 0;
  for (int epoch = 0; epoch < 3; ++epoch) {
    const auto all = sampler.rest_of_epoch();
    std::vector<RecordRef> seen;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i + 1 < all.size()) mixed = mixed && all[i].composition.size() == 3 && all[i].size() == 12;
      seen.insert(seen.end(), all[i].items.begin(), all[i].items.end());
    }
    batches += all.size();
    std::sort(seen.begin(), seen.end());
    std::vector<RecordRef> expected;
    for (std::size_t s = 0; s < reg.size(); ++s)
      for (std::size_t r = 0; r < reg[s].size(); ++r) expected.push_back({s, r});
    covered = covered && seen == expected;
  }
  return {mixed && covered, std::to_string(batches) + " batches over 3 epochs; non-final batches all 3 sources: " +
                                (mixed ? "yes" : "NO") + "; exact multiset coverage: " + (covered ? "yes" : "NO")};
}

// ---- 6 ----

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + OFCLIP_CLI + "\" " + args + " >> \"" + log.string() + "\" 2>&1";
  return std::system(cmd.c_str());
}

EvalReport read_report_json(const fs::path& p) {
  std::ifstream in(p.string() + ".json");
  return EvalReport::from_json(nlohmann::json::parse(in));
}

/// Oracle instances derived from a trained checkpoint on one source.
oracle::SuiteResult checkpoint_suite(const DualEncoder& enc, const DatasetManifest& m,
                                     const std::vector<Vec>& features, const EvalReport& cli_classify) {
  const Tokenizer tk{enc.dims().vocab, 77};
  std::vector<Vec> imgs;
  for (const auto& f : features) imgs.push_back(encode_image(f, enc));
  const Mat images = Mat::from_rows(imgs);
  const auto embed = encoder_text_embedder(enc, tk);
  const auto garments = collect_labels(m, true), attributes = collect_labels(m, false);
  const Mat garment_rows = build_class_embeddings(garments, embed), attr_rows = build_class_embeddings(attributes, embed);
  const Mat captions = embed_captions(enc, m, tk).vectors;

  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
  };
  oracle::SuiteResult r;
  std::size_t n = 0;
  for (std::size_t k : {1u, 3u, 5u, 10u}) {
    oracle::MetricInstance cls{images, garment_rows, {}, {}, k};
    oracle::MetricInstance att{images, attr_rows, {}, {}, k};
    oracle::MetricInstance ret{images, captions, {}, {}, k};
    for (std::size_t q = 0; q < m.size(); ++q) {
      const auto& labels = m.records[q].labels;
      cls.truth.push_back(index_of(garments, labels.front()));
      cls.sets.push_back({cls.truth.back()});
      att.truth.push_back(index_of(attributes, labels.front()));
      std::set<std::size_t> s;
      for (const auto& l : labels) s.insert(index_of(attributes, l));
      att.sets.push_back(s);
      ret.truth.push_back(q);
      ret.sets.push_back({q});
    }
    oracle::check_instance(cls, n++, r);
    oracle::check_instance(att, n++, r);
    oracle::check_instance(ret, n++, r);

    // The CLI report must carry the oracle's numbers.
    std::vector<std::vector<std::size_t>> rankings;
    std::vector<std::size_t> top1;
    for (std::size_t q = 0; q < images.rows(); ++q) {
      rankings.push_back(oracle::full_sort(oracle::scores_against(images, q, garment_rows)));
      top1.push_back(rankings.back().front());
    }
    const auto key = "acc@" + std::to_string(k);
    ++r.comparisons;
    if (!cli_classify.metrics.count(key) ||
        cli_classify.metrics.at(key) != oracle::accuracy_at_k(rankings, cls.truth, k)) {
      ++r.mismatches;
      if (r.first_failure.empty()) r.first_failure = "CLI " + key + " differs from oracle";
    }
    if (k == 1) {
      ++r.comparisons;
      if (cli_classify.metrics.at("weighted_f1") != oracle::weighted_f1(top1, cls.truth, garments.size())) {
        ++r.mismatches;
        if (r.first_failure.empty()) r.first_failure = "CLI weighted_f1 differs from oracle";
      }
    }
  }
  return r;
}

Outcome ablation_harness() {
  const fs::path dir = fs::temp_directory_path() / "ofclip_acceptance_ablation";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir / "cli.log";
  const std::string data = (dir / "data").string();
  const std::string registry = (dir / "data" / "registry.jsonl").string();
  const std::string catalog = (dir / "data" / "catalog.jsonl").string();

  if (run_cli("synth --seed 0 --out \"" + data + "\"", log) != 0) return {false, "synth failed, see " + log.string()};

  std::string detail;
  bool pass = true;
  std::vector<std::string> ckpts;
  for (const std::string mode : {"fixed", "template"}) {
    const std::string ckpt = (dir / (mode + ".ckpt")).string();
    const std::string treport = (dir / (mode + "_train.txt")).string();
    const std::string creport = (dir / (mode + "_classify.txt")).string();
    const std::string rreport = (dir / (mode + "_retrieve.txt")).string();
    int rc = run_cli("train --registry \"" + registry + "\" --seed 0 --steps 300 --lr 1e-3 --prompt-mode " + mode +
                         " --out \"" + ckpt + "\" --report \"" + treport + "\"",
                     log);
    rc |= run_cli("eval classify --checkpoint \"" + ckpt + "\" --manifest \"" + catalog +
                      "\" --preprocess chunks --k 1,3,5,10 --prompt-mode fixed --report \"" + creport + "\"",
                  log);
    rc |= run_cli("eval retrieve --checkpoint \"" + ckpt + "\" --manifest \"" + catalog +
                      "\" --preprocess chunks --k 1,5,10 --prompt-mode fixed --report \"" + rreport + "\"",
                  log);
    if (rc != 0) return {false, "CLI run for mode " + mode + " failed, see " + log.string()};
    ckpts.push_back(ckpt);

    const auto train_report = read_report_json(treport);
    const bool recorded = train_report.tags.at("prompt_mode") == mode;
    std::ifstream text(treport);
    const std::string body((std::istreambuf_iterator<char>(text)), std::istreambuf_iterator<char>());
    const bool text_recorded = body.find("prompt_mode = " + mode) != std::string::npos;

    const auto reg = load_registry(registry);
    const auto features = load_registry_features(reg, 4);
    const auto r = checkpoint_suite(load_checkpoint(ckpt), reg[0], features[0], read_report_json(creport));
    pass = pass && recorded && text_recorded && r.ok();
    detail += mode + ": report mode " + (recorded && text_recorded ? "recorded" : "MISSING") + ", oracle suites " +
              std::to_string(r.comparisons - r.mismatches) + "/" + std::to_string(r.comparisons) +
              (r.first_failure.empty() ? "" : " (" + r.first_failure + ")") + ", final loss " +
              train_report.tags.at("final_loss") + "; ";
  }
  const bool differ = bytes::read_file(ckpts[0]) != bytes::read_file(ckpts[1]);
  pass = pass && differ;
  detail += std::string("checkpoints ") + (differ ? "differ" : "IDENTICAL");
  if (pass) fs::remove_all(dir);
  return {pass, detail};
}

// ---- 7 ----

Outcome format_round_trip() {
  SplitMix64 rng(7);
  const std::size_t n = 10000, d = 32;
  const Mat v = oracle::random_unit_rows(n, d, rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("vec-" + std::to_string(i));
  const fs::path path = fs::temp_directory_path() / "ofclip_acceptance_roundtrip.ofce";
  write_embeddings(path, ids, v);
  const auto written = bytes::read_file(path);
  const auto back = read_embeddings(path);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(back.vectors.data()[i] - v.data()[i]));
  const bool same_ids = back.ids == ids;
  const bool identical = serialize_embeddings(back.ids, back.vectors) == written;
  fs::remove(path);
  return {same_ids && identical && worst <= 0x1.0p-20,
          std::to_string(n) + " x " + std::to_string(d) + ": max abs err " + fmt("%.3g", worst) + " (bound " +
              fmt("%.3g", 0x1.0p-20) + "), ids " + (same_ids ? "preserved" : "CHANGED") + ", re-serialization " +
              (identical ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"loss closed forms", loss_closed_forms},
      {"gradient suite", gradient_suite},
      {"metric oracle equivalence", metric_oracles},
      {"toy convergence", toy_convergence},
      {"sampler contract", sampler_contract},
      {"ablation harness", ablation_harness},
      {"format round-trip", format_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
