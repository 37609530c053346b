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

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pecsim/characterize.hpp"
#include "pecsim/hubbard.hpp"
#include "pecsim/pec.hpp"
#include "pecsim/postproc.hpp"
#include "pecsim/simulate.hpp"

namespace pecsim {

/// Declarative channel description from a config file.
///   identity
///   depolarizing   one of p | avg_gate_fidelity | cost
///   pauli          explicit `terms`
///   pauli_error    single Pauli `label` with one of p | avg_gate_fidelity
struct ChannelSpec {
  std::string type = "identity";
  std::optional<double> p;
  std::optional<double> avg_gate_fidelity;
  std::optional<double> cost;
  std::string label;
  std::map<std::string, double> terms;

  PauliChannel resolve(int qubit_count) const;
};

struct NoiseSpec {
  ChannelSpec default_channel;
  std::map<std::string, ChannelSpec> gates;  // pair key or gate id
  std::map<std::string, double> overrotation;
  std::optional<ChannelSpec> crosstalk;
  std::optional<ChannelSpec> single_qubit;
  std::vector<Confusion> readout;

  NoiseModel build() const;
};

enum class PecMode { kSampled, kOracle };

struct ExperimentConfig {
  std::string name = "custom";
  HubbardSpec model;
  int steps = 1;            // M
  double phi = 0.0;         // J dt / 2
  std::vector<std::pair<std::string, std::complex<double>>> initial_state;
  NoiseSpec noise;

  PecMode pec_mode = PecMode::kSampled;
  std::size_t samples = 1000;   // N_s
  std::int64_t shots = 300;     // repetitions per sampled circuit
  std::int64_t raw_shots = 3000;
  std::uint64_t master_seed = 1;

  std::int64_t shots_per_setting = 10000;
  std::uint64_t characterization_seed = 2;
  bool exact_characterization = false;

  bool mle = true;
  bool ps = true;
  int bootstrap = 1000;
  std::uint64_t bootstrap_seed = 3;
  std::vector<std::string> sector;  // empty: derived from the initial state
  std::optional<SpinLayout> layout;  // two-component runs only

  double dt() const { return 2.0 * phi / model.tunneling; }
  ComplexVector initial_vector() const;
  SymmetrySector symmetry_sector() const;
  SpinLayout spin_layout() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ExperimentConfig preset(std::string_view name);

std::string config_to_json(const ExperimentConfig& cfg);
/// Throws ConfigError naming the offending field (and line for syntax errors).
ExperimentConfig config_from_json(std::string_view text);

/// Bisection for the parameter x in [lo, hi] at which the decreasing function
/// `metric(x)` equals `target`.
double bisect_parameter(const std::function<double(double)>& metric, double target, double lo,
                        double hi);

/// Two-qubit channel of a named family whose average gate fidelity is `target`.
PauliChannel calibrate_channel(const std::string& family, double target_avg_fidelity,
                               const std::string& label = "");

struct FidelityRecord {
  int step = 0;
  Stage stage = Stage::kRaw;
  double value = 0.0;
  double unnormalized = 0.0;  // negatives clipped, no renormalization
  double err_lo = 0.0;
  double err_hi = 0.0;
};

struct SpinChargeRecord {
  int step = 0;
  Stage stage = Stage::kIdeal;
  int site = 0;
  double spin = 0.0;
  double charge = 0.0;
  double spin_err = 0.0;
  double charge_err = 0.0;
};

/// Simulated measurement data of one Trotter step.
struct StepData {
  int step = 0;
  std::size_t entangling_gates = 0;
  double cost = 1.0;
  RealVector ideal;
  RealVector noisy;          // exact noisy populations
  ShotCounts raw_counts;     // empty in oracle mode
  PecRun pec;                // empty in oracle mode
  RealVector pec_oracle;     // oracle mode only
};

struct ResultBundle {
  ExperimentConfig config;
  int qubit_count = 0;
  int gates_per_step = 0;
  std::vector<GateCharacterization> characterizations;
  DecompositionTable decompositions;
  std::vector<StepData> data;

  std::vector<PopulationRecord> populations;
  std::vector<FidelityRecord> fidelities;
  std::vector<SpinChargeRecord> spin_charge;
  std::map<Stage, FidelityFit> fits;
  std::vector<double> leakage;  // post-selection discarded mass per step

  bool empty() const { return data.empty(); }
  /// Final enabled mitigation stage (ps, mle or pec).
  Stage mitigated_stage() const;
  const PopulationRecord* find(int step, Stage stage) const;
  const FidelityRecord* find_fidelity(int step, Stage stage) const;
};

/// Characterize, decompose, and simulate raw and PEC data for every step.
ResultBundle simulate_experiment(const ExperimentConfig& cfg);
/// (Re)computes PEC -> MLE -> PS, fidelities, fits, spin/charge and
/// bootstrap bars from a bundle's data.
void mitigate(ResultBundle& bundle);
/// simulate_experiment followed by mitigate.
ResultBundle run_experiment(const ExperimentConfig& cfg);

/// Compiled circuit for `steps` Trotter steps of the configured model.
Circuit experiment_circuit(const ExperimentConfig& cfg, int steps);

// Report output.

/// Writes populations_ideal.csv, populations_raw.csv, populations_mitigated.csv,
/// fidelity.csv, costs.csv, fits.json and (two-component) spin_charge.csv.
/// Files are staged and moved in only after all of them were written.
std::vector<std::string> report(const ResultBundle& bundle, const std::filesystem::path& out_dir);

std::string bundle_to_json(const ResultBundle& bundle);
ResultBundle bundle_from_json(std::string_view text);

/// 64-bit FNV-1a, hex encoded.
std::string content_hash(std::string_view text);

}  // namespace pecsim
