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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pecsim/linalg.hpp"
#include "pecsim/simulate.hpp"

namespace pecsim {

enum class Stage { kIdeal, kNoisy, kRaw, kPec, kMle, kPs };

std::string stage_name(Stage stage);
Stage parse_stage(std::string_view name);

struct PopulationRecord {
  int step = 0;
  Stage stage = Stage::kRaw;
  RealVector values;
  RealVector err_lo;
  RealVector err_hi;
};

/// Basis states allowed by the conserved quantities of a run.
struct SymmetrySector {
  int qubit_count = 0;
  std::vector<std::size_t> allowed;  // sorted basis indices
  std::string description;

  static SymmetrySector from_labels(std::span<const std::string> labels);
  /// Basis states with the same particle number as some state in `support`.
  /// With `spin_resolved`, the up (first half) and down (second half)
  /// numbers must match separately.
  static SymmetrySector matching(int qubit_count, std::span<const std::size_t> support,
                                 bool spin_resolved);

  bool contains(std::size_t index) const;
  std::vector<std::string> labels() const;
};

/// Euclidean projection onto the probability simplex (sort-and-threshold).
RealVector mle_project(std::span<const double> raw);

struct PostSelection {
  RealVector values;
  double leakage = 0.0;
};

/// Zeroes entries outside the sector and renormalizes. Throws EmptySector.
PostSelection post_select(std::span<const double> p, const SymmetrySector& sector);

enum class FidelityMode {
  kNormalized,  // clip negatives, renormalize both, then |sum sqrt(p q)|^2
  kRaw,         // clip negatives only; can exceed 1 for PEC output
};

double population_fidelity(std::span<const double> p, std::span<const double> ideal,
                           FidelityMode mode = FidelityMode::kNormalized);

struct FidelityFit {
  double per_gate = 1.0;
  double standard_error = 0.0;
  double amplitude = 1.0;
};

/// Least-squares fit of F(step) = A f^(gates_per_step * step).
FidelityFit fit_fidelity_per_gate(std::span<const double> steps, std::span<const double> fidelities,
                                  int gates_per_step);

/// Qubits holding site l: up[l] and down[l].
struct SpinLayout {
  std::vector<int> up;
  std::vector<int> down;

  /// Default layout: sites 0..L-1 on qubits 0..L-1 (up) and L..2L-1 (down).
  static SpinLayout chain(int sites);
};

struct SpinCharge {
  double spin = 0.0;
  double charge = 0.0;
};

SpinCharge spin_charge(std::span<const double> p, const SpinLayout& layout, int site);

struct BootstrapResult {
  std::vector<double> point;
  std::vector<double> stddev;
  std::vector<double> err_lo;  // deviation of replicates below the point
  std::vector<double> err_hi;  // deviation of replicates above the point
  std::size_t replicates = 0;
};

inline constexpr int kMinBootstrapReplicates = 100;

using RecordPipeline = std::function<std::vector<double>(std::span<const std::size_t>)>;
using CountsPipeline = std::function<std::vector<double>(const ShotCounts&)>;

/// Resamples record indices 0..record_count-1 with replacement at the
/// original size, reruns `pipeline` per replicate, and summarizes each output.
BootstrapResult bootstrap_records(std::size_t record_count, const RecordPipeline& pipeline,
                                  int replicates, std::uint64_t seed);

/// Resamples individual shots of one record with replacement.
BootstrapResult bootstrap_shots(const ShotCounts& counts, const CountsPipeline& pipeline,
                                int replicates, std::uint64_t seed);

}  // namespace pecsim
