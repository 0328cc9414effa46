// Copyright 2026 The toral-decay Authors.
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

namespace toral {

enum class ErrorKind {
  kDimensionMismatch,
  kNotExpanding,
  kSingularMatrix,
  kNotSimilarity,
  kNotMeanZero,
  kNotDecreasing,
  kBadInput,
  kTooLarge,
  kTruncationTooSmall,
  kZeroVariance,
  kAllZero,
  kDegenerateBound,
  kInternal,
};

// Process exit status for an error class: bad input 2, guard exceeded 3,
// broken internal invariant 4.
inline int ExitCodeFor(ErrorKind kind);

inline const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTooLarge:
    case ErrorKind::kTruncationTooSmall:
      return 3;
    case ErrorKind::kInternal:
    case ErrorKind::kDegenerateBound:
      return 4;
    default:
      return 2;
  }
}

inline const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNotExpanding: return "NotExpanding";
    case ErrorKind::kSingularMatrix: return "SingularMatrix";
    case ErrorKind::kNotSimilarity: return "NotSimilarity";
    case ErrorKind::kNotMeanZero: return "NotMeanZero";
    case ErrorKind::kNotDecreasing: return "NotDecreasing";
    case ErrorKind::kBadInput: return "BadInput";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kTruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::kZeroVariance: return "ZeroVariance";
    case ErrorKind::kAllZero: return "AllZero";
    case ErrorKind::kDegenerateBound: return "DegenerateBound";
    case ErrorKind::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace toral
