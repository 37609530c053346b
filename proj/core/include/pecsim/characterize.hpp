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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pecsim/hubbard.hpp"
#include "pecsim/pauli.hpp"
#include "pecsim/simulate.hpp"

namespace pecsim {

/// Product of single-qubit Pauli eigenstates used as a tomography input,
/// one (axis, sign) per qubit, e.g. "+X,-Z".
struct ProductEigenstate {
  std::vector<Pauli> axes;  // X, Y or Z
  std::vector<int> signs;   // +1 or -1

  std::string label() const;
  PauliVector pauli_vector() const;
};

/// One tomography setting: prepare `input`, measure observable `observable`.
struct QptSetting {
  std::size_t observable = 0;
  ProductEigenstate input;
  double ideal_expectation = 0.0;
  double measured_expectation = 0.0;
};

struct GateCharacterization {
  std::string gate_id;
  EntanglingGate gate;
  Ptm ideal = Ptm::identity(2);
  Ptm estimated_noisy = Ptm::identity(2);
  /// Unclipped Pauli eigenvalue estimates, entry 0 fixed to 1.
  RealVector eigenvalues;
  std::vector<QptSetting> settings;  // one per non-identity observable
  std::int64_t shots_per_setting = 0;  // 0 means exact expectations
};

struct QuasiProbDecomposition {
  std::string gate_id;
  int qubit_count = 2;
  std::vector<double> q;
  std::vector<double> p;
  std::vector<int> signs;
  double cost = 1.0;
  bool clipped = false;  // eigenvalues were clipped before decomposition
};

using DecompositionTable = std::map<std::string, QuasiProbDecomposition>;

/// Lower/upper bound applied to eigenvalue estimates before decomposition.
inline constexpr double kEigenvalueFloor = 1e-3;
inline constexpr double kEigenvalueCeiling = 1.0;

/// Simulated process tomography of one noisy entangler under the Pauli-error
/// assumption: one setting per non-identity observable b, chosen to maximize
/// the ideal output signal, yields lambda_b = <P_b>_measured / <P_b>_ideal.
/// `shots_per_setting == 0` selects exact expectations.
GateCharacterization characterize_gate(const EntanglingGate& gate, const NoiseModel& nm,
                                       std::int64_t shots_per_setting, std::uint64_t seed);

/// noisy * ideal^-1.
Ptm error_operator(const Ptm& noisy, const Ptm& ideal);

/// Quasi-probabilities q_a = 4^-n sum_b w(a,b) / lambda_b of a diagonal error
/// PTM's inverse, with sampling probabilities, signs and cost.
QuasiProbDecomposition decompose_inverse(const Ptm& error, const std::string& gate_id = "");

/// Error operator of a characterization with eigenvalues clipped into
/// [kEigenvalueFloor, kEigenvalueCeiling], then decomposed.
QuasiProbDecomposition decompose_characterization(const GateCharacterization& ch);

/// sum_a q_a PTM(P_a): the inverse-error PTM a decomposition represents.
Ptm recompose(const QuasiProbDecomposition& d);

const QuasiProbDecomposition& find_decomposition(const DecompositionTable& table,
                                                 const EntanglingGate& gate);

/// Product of per-gate costs over the circuit's entangling gates.
double circuit_cost(const DecompositionTable& decomps, const Circuit& circuit);

}  // namespace pecsim
