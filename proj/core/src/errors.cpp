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

#include "pecsim/errors.hpp"

namespace pecsim {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonUnitary: return "NonUnitary";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kInvalidWeights: return "InvalidWeights";
    case ErrorCode::kUnsupportedSize: return "UnsupportedSize";
    case ErrorCode::kInvalidSteps: return "InvalidSteps";
    case ErrorCode::kUnknownGateKind: return "UnknownGateKind";
    case ErrorCode::kSizeGuard: return "SizeGuard";
    case ErrorCode::kMissingNoiseEntry: return "MissingNoiseEntry";
    case ErrorCode::kSingularConfusion: return "SingularConfusion";
    case ErrorCode::kNonPauliError: return "NonPauliError";
    case ErrorCode::kDegenerateSetting: return "DegenerateSetting";
    case ErrorCode::kSingularEigenvalue: return "SingularEigenvalue";
    case ErrorCode::kNonDiagonal: return "NonDiagonal";
    case ErrorCode::kMissingDecomposition: return "MissingDecomposition";
    case ErrorCode::kInvalidObservable: return "InvalidObservable";
    case ErrorCode::kTooManyGates: return "TooManyGates";
    case ErrorCode::kEmptySector: return "EmptySector";
    case ErrorCode::kFitDegenerate: return "FitDegenerate";
    case ErrorCode::kBadLayout: return "BadLayout";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

}  // namespace pecsim
