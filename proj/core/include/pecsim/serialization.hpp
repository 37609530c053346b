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

#include <string>
#include <string_view>

#include "pecsim/characterize.hpp"
#include "pecsim/hubbard.hpp"
#include "pecsim/pauli.hpp"
#include "pecsim/pec.hpp"
#include "pecsim/simulate.hpp"

namespace pecsim {

/// JSON text for library value types. Doubles are written with round-trip
/// precision, so from_json(to_json(x)) == x exactly.
template <typename T>
std::string to_json(const T& value);

/// Parses JSON produced by to_json. Throws Error(kConfigError) naming the
/// offending field, or the line and column of a syntax error.
template <typename T>
T from_json(std::string_view text);

template <> std::string to_json<Ptm>(const Ptm&);
template <> std::string to_json<PauliChannel>(const PauliChannel&);
template <> std::string to_json<Circuit>(const Circuit&);
template <> std::string to_json<ShotCounts>(const ShotCounts&);
template <> std::string to_json<GateCharacterization>(const GateCharacterization&);
template <> std::string to_json<QuasiProbDecomposition>(const QuasiProbDecomposition&);
template <> std::string to_json<PecEstimate>(const PecEstimate&);
template <> std::string to_json<PecSample>(const PecSample&);

template <> Ptm from_json<Ptm>(std::string_view);
template <> PauliChannel from_json<PauliChannel>(std::string_view);
template <> Circuit from_json<Circuit>(std::string_view);
template <> ShotCounts from_json<ShotCounts>(std::string_view);
template <> GateCharacterization from_json<GateCharacterization>(std::string_view);
template <> QuasiProbDecomposition from_json<QuasiProbDecomposition>(std::string_view);
template <> PecEstimate from_json<PecEstimate>(std::string_view);
template <> PecSample from_json<PecSample>(std::string_view);

}  // namespace pecsim
