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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ofclip {

enum class ErrorCode {
  // numeric
  ZeroVector,
  NonFinite,
  // shapes
  DimMismatch,
  ShapeMismatch,
  // text / prompts
  EmptyText,
  EmptyCaption,
  TokenOutOfRange,
  DuplicateLabel,
  EmptyLabelSet,
  // data files
  IoError,
  ParseError,
  DuplicateId,
  MissingField,
  BadMagic,
  UnsupportedVersion,
  CorruptRecord,
  NotNormalized,
  // metrics
  MissingTruth,
  EmptyTruthSet,
  EmptyRelevance,
  // images
  InvalidTarget,
  CropTooLarge,
  NotGrayscale,
  // configuration
  BatchTooSmall,
  ConfigError,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::EmptyCaption: return "EmptyCaption";
    case ErrorCode::TokenOutOfRange: return "TokenOutOfRange";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::EmptyLabelSet: return "EmptyLabelSet";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::MissingTruth: return "MissingTruth";
    case ErrorCode::EmptyTruthSet: return "EmptyTruthSet";
    case ErrorCode::EmptyRelevance: return "EmptyRelevance";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::CropTooLarge: return "CropTooLarge";
    case ErrorCode::NotGrayscale: return "NotGrayscale";
    case ErrorCode::BatchTooSmall: return "BatchTooSmall";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Process exit status for the CLI: 2 config, 3 data, 4 numeric.
inline int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector:
    case ErrorCode::NonFinite:
      return 4;
    case ErrorCode::BatchTooSmall:
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidTarget:
    case ErrorCode::CropTooLarge:
      return 2;
    default:
      return 3;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace ofclip
