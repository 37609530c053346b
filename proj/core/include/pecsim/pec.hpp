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
#include <string>
#include <vector>

#include "pecsim/characterize.hpp"
#include "pecsim/hubbard.hpp"
#include "pecsim/simulate.hpp"

namespace pecsim {

/// Pauli insertions drawn for one random circuit. insertions[g] is the Pauli
/// index applied right after the g-th entangling gate of the base circuit.
struct SampledCircuit {
  std::vector<std::size_t> insertions;
  int sign = 1;
  std::uint64_t sample_seed = 0;
};

/// Observable measured on each sampled circuit: a computational-basis
/// projector |x><x| or a Pauli string.
struct Observable {
  enum class Kind { kProjector, kPauli };
  Kind kind = Kind::kProjector;
  std::size_t index = 0;  // basis index or Pauli index
  int qubit_count = 0;

  static Observable projector(std::string_view basis_label);
  static Observable pauli(std::string_view pauli_label);
  /// One projector per basis state, in basis order.
  static std::vector<Observable> all_projectors(int qubit_count);

  std::string label() const;
};

struct PecEstimate {
  std::string observable;
  double value = 0.0;
  std::size_t samples = 0;
  std::int64_t shots = 0;  // 0 = exact per-sample expectations
  double standard_error = 0.0;
  double cost = 1.0;
};

/// Per-sample record: its sign and measured values.
struct PecSample {
  std::size_t sample_index = 0;
  int sign = 1;
  std::vector<std::size_t> insertions;
  ShotCounts counts;        // empty when exact
  RealVector populations;   // readout-corrected frequencies, or exact populations
  std::vector<double> values;  // one per requested observable
};

struct PecRun {
  double cost = 1.0;
  std::int64_t shots = 0;
  std::vector<std::string> observables;
  std::vector<PecSample> samples;
};

/// Precomputed per-gate sampling tables for one circuit.
class PecSampler {
 public:
  PecSampler(const Circuit& base, const DecompositionTable& decomps);

  SampledCircuit sample(std::uint64_t master_seed, std::size_t sample_index) const;
  double cost() const { return cost_; }
  std::size_t gate_count() const { return cdfs_.size(); }

 private:
  std::vector<std::vector<double>> cdfs_;
  std::vector<std::vector<int>> signs_;
  double cost_ = 1.0;
};

SampledCircuit sample_circuit(const Circuit& base, const DecompositionTable& decomps,
                              std::uint64_t master_seed, std::size_t sample_index);

/// Simulates `samples` random circuits under `nm` and records each one.
/// `shots == 0` takes exact expectations per sample. Samples may be evaluated
/// concurrently; results are stored by sample index.
PecRun run_pec_samples(const Circuit& base, const NoiseModel& nm, const DecompositionTable& decomps,
                       const PauliVector& initial, const std::vector<Observable>& observables,
                       std::size_t samples, std::int64_t shots, std::uint64_t master_seed);

/// C/N_s sum_s sign_s <mu>_s with standard error C sd(sign <mu>) / sqrt(N_s),
/// reduced in sample-index order.
std::vector<PecEstimate> summarize(const PecRun& run);

/// Signed populations over a subset (with repetition) of a run's samples.
RealVector signed_populations(const PecRun& run, std::span<const std::size_t> sample_indices);
RealVector signed_populations(const PecRun& run);

std::vector<PecEstimate> estimate(const Circuit& base, const NoiseModel& nm,
                                  const DecompositionTable& decomps, const PauliVector& initial,
                                  const std::vector<Observable>& observables, std::size_t samples,
                                  std::int64_t shots, std::uint64_t master_seed);

/// Composes inverse-error, noise and ideal PTMs for every entangling gate.
RealVector pec_exact_oracle(const Circuit& base, const NoiseModel& nm,
                            const DecompositionTable& decomps, const PauliVector& initial);

/// Exact weighted sum over all 16^N_g insertion patterns (N_g <= 2).
double enumerate_exact(const Circuit& base, const NoiseModel& nm, const DecompositionTable& decomps,
                       const PauliVector& initial, const Observable& observable);

/// Exact expectation of an observable on a Pauli-vector state.
double expectation(const PauliVector& state, const Observable& observable);

}  // namespace pecsim
