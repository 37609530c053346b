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

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "pecsim/linalg.hpp"
#include "pecsim/pauli.hpp"

namespace pecsim {

enum class Components { kOne = 1, kTwo = 2 };

/// Extended Fermi-Hubbard chain. For two components, qubits 0..L-1 carry the
/// spin-up sites and L..2L-1 the spin-down sites.
struct HubbardSpec {
  int sites = 2;
  Components components = Components::kOne;
  double tunneling = 1.0;  // J
  double onsite = 0.0;     // U, ignored for one component
  double neighbor = 0.0;   // V

  int qubit_count() const { return components == Components::kOne ? sites : 2 * sites; }
  /// Throws UnsupportedSize / InvalidArgument. Returns a copy with U zeroed
  /// for one-component chains.
  HubbardSpec validated() const;
};

enum class TermPart { kX, kY, kZ };

struct PauliTerm {
  double coefficient = 0.0;
  PauliString pauli;
  TermPart part = TermPart::kZ;
};

/// sum_k c_k P_k + offset * I. Terms inside one part mutually commute.
struct PauliHamiltonian {
  int qubit_count = 0;
  double offset = 0.0;
  std::vector<PauliTerm> terms;

  std::vector<PauliTerm> part(TermPart which) const;
};

enum class Axis { kX, kY, kZ };
enum class EntanglerKind { kXX, kYY, kZZ };

char axis_char(Axis axis);
std::string entangler_name(EntanglerKind kind);

/// exp(-i angle/2 sigma_axis) on one qubit.
struct SingleQubitRotation {
  Axis axis = Axis::kZ;
  double angle = 0.0;
  int qubit = 0;
};

/// exp(-i angle sigma (x) sigma) on qubits (first, second); `gate_id` keys
/// the noise model and the characterization tables.
struct EntanglingGate {
  EntanglerKind kind = EntanglerKind::kYY;
  double angle = 0.0;
  int first = 0;
  int second = 1;
  std::string gate_id;
};

using Gate = std::variant<SingleQubitRotation, EntanglingGate>;

struct Circuit {
  int qubit_count = 0;
  std::vector<Gate> gates;

  std::size_t entangling_count() const;
  std::vector<const EntanglingGate*> entangling_gates() const;
};

/// Pair-level key, e.g. "YY(0,1)". Qubits are 0-based.
std::string pair_key(EntanglerKind kind, int first, int second);
/// Key of a compiled native gate including its angle, e.g. "YY(0,1)@0.785398".
std::string native_gate_id(int first, int second, double angle);

/// Local unitary of a gate: 2x2 for rotations, 4x4 for entangling gates.
ComplexMatrix gate_unitary(const Gate& gate);
std::vector<int> gate_qubits(const Gate& gate);

PauliHamiltonian build_hamiltonian(const HubbardSpec& spec);

ComplexMatrix exact_matrix(const PauliHamiltonian& h);

/// First-order Trotter circuit: `steps` repetitions of
/// exp(-i H_Z dt) exp(-i H_Y dt) exp(-i H_X dt), dt = total_time / steps.
Circuit trotter_circuit(const PauliHamiltonian& h, double total_time, int steps);

/// Rewrites XX and ZZ entanglers into YY conjugated by sqrt(Z) / sqrt(X)
/// rotations and assigns native gate ids.
Circuit compile_to_native(const Circuit& circuit);

/// Merges runs of same-axis rotations on a qubit that are not separated by a
/// gate touching that qubit, and drops rotations with zero angle.
Circuit merge_rotations(const Circuit& circuit);

/// Full 2^n x 2^n unitary of a circuit.
ComplexMatrix circuit_unitary(const Circuit& circuit);

}  // namespace pecsim
