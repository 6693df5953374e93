// Copyright 2026 The JMIE Authors.
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

#ifndef JMIE_ERROR_HPP_
#define JMIE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace jmie {

enum class ErrorCode {
  // corpus
  kMalformedLine,
  kIndexOutOfRange,
  kConceptTextMismatch,
  kDanglingAnnotation,
  kOverlappingSpans,
  kTooFewDocuments,
  kInvalidSpec,
  kCorpusMismatch,
  // autodiff
  kShapeMismatch,
  kNonFiniteValue,
  kNonScalarLoss,
  kNonFiniteGradient,
  // encoder
  kMissingEmbeddingEntry,
  kDimensionMismatch,
  kRaggedLine,
  kEmptyFile,
  kBadMagic,
  kTokenCountMismatch,
  // decoders
  kLengthMismatch,
  kHeadOutOfRange,
  kFeatureDimMismatch,
  // trainer
  kDivergedLoss,
  kInvalidConfig,
  // misc
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (the CLI in particular) distinguish data errors from bugs.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace jmie

#endif  // JMIE_ERROR_HPP_
