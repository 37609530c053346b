// Copyright 2026 The pecsim Authors
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

namespace pecsim {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNonUnitary,
  kSingular,
  kIndexOutOfRange,
  kInvalidWeights,
  kUnsupportedSize,
  kInvalidSteps,
  kUnknownGateKind,
  kSizeGuard,
  kMissingNoiseEntry,
  kSingularConfusion,
  kNonPauliError,
  kDegenerateSetting,
  kSingularEigenvalue,
  kNonDiagonal,
  kMissingDecomposition,
  kInvalidObservable,
  kTooManyGates,
  kEmptySector,
  kFitDegenerate,
  kBadLayout,
  kInsufficientData,
  kConfigError,
  kIoError,
};

/// Stable, machine-readable name of an error code (e.g. "DimensionMismatch").
std::string_view error_code_name(ErrorCode code);

/// The single exception type thrown by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pecsim
