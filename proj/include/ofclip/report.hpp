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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "ofclip/error.hpp"

namespace ofclip {

/// Metric values are fractions in [0, 1]; the text form prints them x100.
struct EvalReport {
  std::string task;
  std::map<std::string, std::string> tags;  // e.g. prompt_mode, direction
  std::map<std::string, double> metrics;
  std::map<std::string, std::uint64_t> counts;

  /// key = value lines: tags, then metrics (x100, 2 decimals), then counts.
  std::string to_text() const {
    std::string out = "task = " + task + "\n";
    for (const auto& [k, v] : tags) out += k + " = " + v + "\n";
    for (const auto& [k, v] : metrics) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
      out += k + " = " + buf + "\n";
    }
    for (const auto& [k, v] : counts) out += k + " = " + std::to_string(v) + "\n";
    return out;
  }

  /// Machine-readable form with full double precision.
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["task"] = task;
    j["tags"] = tags;
    j["metrics"] = metrics;
    j["counts"] = counts;
    return j;
  }

  static EvalReport from_json(const nlohmann::json& j) {
    EvalReport r;
    try {
      r.task = j.at("task").get<std::string>();
      r.tags = j.at("tags").get<std::map<std::string, std::string>>();
      r.metrics = j.at("metrics").get<std::map<std::string, double>>();
      r.counts = j.at("counts").get<std::map<std::string, std::uint64_t>>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    return r;
  }

  bool operator==(const EvalReport&) const = default;
};

/// Writes `path` as text and `path` + ".json" as the machine-readable twin.
inline void write_report(const std::filesystem::path& path, const EvalReport& report) {
  {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write report " + path.string());
    out << report.to_text();
  }
  std::ofstream js(path.string() + ".json");
  if (!js) fail(ErrorCode::IoError, "cannot write report " + path.string() + ".json");
  js << report.to_json().dump(2) << "\n";
}

}  // namespace ofclip
