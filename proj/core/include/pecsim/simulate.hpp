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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pecsim/hubbard.hpp"
#include "pecsim/linalg.hpp"
#include "pecsim/pauli.hpp"

namespace pecsim {

/// Computational-basis label of `index`, qubit 0 leftmost ("10" = qubit 0 set).
std::string basis_label(std::size_t index, int qubit_count);
std::size_t basis_index(std::string_view label);

/// Normalized computational basis state.
ComplexVector basis_state(std::string_view label);
/// Equal-weight superposition of the given basis labels.
ComplexVector superposition(std::span<const std::string> labels);

/// State as Pauli expectations <P_i>, index 0 is the identity.
class PauliVector {
 public:
  PauliVector(int qubit_count, RealVector coefficients);

  static PauliVector from_state(const ComplexVector& state);
  static PauliVector from_density(const ComplexMatrix& rho);
  /// I / 2^n: only the identity coefficient is set.
  static PauliVector maximally_mixed(int qubit_count);

  int qubit_count() const { return qubit_count_; }
  const RealVector& coefficients() const { return coefficients_; }
  RealVector& coefficients() { return coefficients_; }
  double operator[](std::size_t i) const { return coefficients_(static_cast<Eigen::Index>(i)); }

  /// rho = (1 / 2^n) sum_i c_i P_i.
  ComplexMatrix density() const;
  /// Smallest eigenvalue of the reconstructed density (negative for pseudo-states).
  double min_eigenvalue() const;

 private:
  int qubit_count_;
  RealVector coefficients_;
};

using Confusion = Eigen::Matrix2d;  // (read b, true a) = P(b | a)

/// Per-gate Pauli errors applied after the ideal gate, plus optional extras.
/// Channels are looked up by gate id, then by pair key ("YY(0,1)"), then by
/// the default key "*".
struct NoiseModel {
  std::map<std::string, PauliChannel> per_gate;
  /// Coherent over-rotation added to an entangler's angle, same lookup order.
  /// Violates the Pauli-error assumption; used for stress tests only.
  std::map<std::string, double> overrotation;
  /// Single-qubit Pauli channel hitting every spectator qubit of each
  /// entangling gate. Invisible to isolated gate characterization.
  std::optional<PauliChannel> crosstalk;
  /// Single-qubit channel after each rotation; unset means noiseless.
  std::optional<PauliChannel> single_qubit;
  /// One confusion matrix per qubit; empty means perfect readout.
  std::vector<Confusion> readout;

  static NoiseModel identity();
  static NoiseModel uniform(const PauliChannel& two_qubit_channel);

  const PauliChannel& channel_for(const EntanglingGate& gate) const;
  double overrotation_for(const EntanglingGate& gate) const;
  /// Throws SingularConfusion / InvalidArgument.
  void validate_readout(int qubit_count) const;
};

struct ShotCounts {
  int qubit_count = 0;
  std::int64_t shots = 0;
  std::vector<std::int64_t> counts;  // indexed by basis index
  bool clipped = false;              // negative input populations were clipped

  RealVector frequencies() const;
};

ComplexVector evolve_exact(const PauliHamiltonian& h, double t, const ComplexVector& initial);

ComplexVector evolve_circuit(const Circuit& c, const ComplexVector& initial);
/// |amplitude|^2 after the ideal circuit.
RealVector run_ideal(const Circuit& c, const ComplexVector& initial);

RealVector probabilities(const ComplexVector& state);

/// A circuit lowered to local PTMs with noise folded in, reusable across
/// many evaluations (e.g. PEC samples).
struct PtmOp {
  std::vector<int> qubits;
  RealMatrix local;
  int entangler = -1;  // index among entangling gates, or -1
};

struct PtmProgram {
  int qubit_count = 0;
  std::vector<PtmOp> ops;
  std::vector<std::vector<int>> entangler_qubits;
};

/// Ideal gate PTMs; noisy ones (gate, then its Pauli channel, then crosstalk)
/// when `noise` is given.
PtmProgram lower_to_ptm(const Circuit& c, const NoiseModel* noise);

/// Runs `program`. If `after_entangler` is non-empty it holds one local PTM per
/// entangling gate, applied to that gate's qubits right after it.
PauliVector run_program(const PtmProgram& program, PauliVector state,
                        std::span<const RealMatrix> after_entangler = {});

PauliVector run_noisy_ptm(const Circuit& c, const NoiseModel& nm, const PauliVector& initial);

/// Density-matrix evolution with Kraus-style Pauli channels. Independent of
/// the PTM path; used to cross-check it.
ComplexMatrix run_noisy_density(const Circuit& c, const NoiseModel& nm, const ComplexMatrix& rho);

/// Diagonal of the reconstructed density. Negative entries are kept.
RealVector populations_from_pauli_vector(const PauliVector& v);

/// Multinomial draw from `populations` (negatives clipped, then renormalized).
ShotCounts sample_shots(std::span<const double> populations, std::int64_t shots,
                        std::uint64_t seed);

enum class ReadoutDirection { kCorrupt, kCorrect };

/// Multiplies populations by the tensor-product confusion matrix, or its inverse.
RealVector apply_readout_error(std::span<const double> populations, const NoiseModel& nm,
                               ReadoutDirection direction);

/// Flips each recorded shot through the confusion matrices.
ShotCounts corrupt_counts(const ShotCounts& counts, const NoiseModel& nm, std::uint64_t seed);

/// Frequencies of `counts` with readout errors inverted; may go negative.
RealVector correct_counts(const ShotCounts& counts, const NoiseModel& nm);

}  // namespace pecsim
