// Copyright 2026 The subbench Authors
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
#include <utility>

namespace subbench {

/// Error carrying a machine-parsable kind tag next to the human detail.
/// The CLI prints errors as "error: <kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

namespace errkind {
inline constexpr const char* kIoError = "IoError";
inline constexpr const char* kSubsetTooLarge = "SubsetTooLarge";
inline constexpr const char* kEmptyVocab = "EmptyVocab";
inline constexpr const char* kInvalidQuery = "InvalidQuery";
inline constexpr const char* kEmptyEvalSet = "EmptyEvalSet";
inline constexpr const char* kZeroProbabilityEvent = "ZeroProbabilityEvent";
inline constexpr const char* kEmptyTrainingStream = "EmptyTrainingStream";
inline constexpr const char* kZeroVector = "ZeroVector";
inline constexpr const char* kNoApplicableQuestions = "NoApplicableQuestions";
inline constexpr const char* kDegenerateSample = "DegenerateSample";
inline constexpr const char* kInvalidStatistic = "InvalidStatistic";
inline constexpr const char* kTooFewBins = "TooFewBins";
inline constexpr const char* kShapeMismatch = "ShapeMismatch";
inline constexpr const char* kNumericalUnderflow = "NumericalUnderflow";
inline constexpr const char* kConfigError = "ConfigError";
inline constexpr const char* kCellFailed = "CellFailed";
}  // namespace errkind

[[noreturn]] inline void raise(const char* kind, const std::string& detail) {
  throw Error(kind, detail);
}

}  // namespace subbench
