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

#include <benchmark/benchmark.h>

#include "pecsim/characterize.hpp"
#include "pecsim/experiment.hpp"
#include "pecsim/pec.hpp"

namespace {

struct Setup {
  pecsim::Circuit circuit;
  pecsim::NoiseModel noise;
  pecsim::DecompositionTable table;
  pecsim::PauliVector initial = pecsim::PauliVector::maximally_mixed(1);
};

Setup make(const char* name) {
  const pecsim::ExperimentConfig cfg = pecsim::preset(name);
  Setup s;
  s.circuit = pecsim::experiment_circuit(cfg, cfg.steps);
  s.noise = cfg.noise.build();
  for (const auto* g : s.circuit.entangling_gates()) {
    if (s.table.contains(g->gate_id)) continue;
    s.table[g->gate_id] = pecsim::decompose_characterization(pecsim::characterize_gate(*g, s.noise, 0, 1));
  }
  s.initial = pecsim::PauliVector::from_state(cfg.initial_vector());
  return s;
}

void BM_SampleCircuit(benchmark::State& state) {
  const Setup s = make("two_spinless");
  const pecsim::PecSampler sampler(s.circuit, s.table);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(7, i++));
}
BENCHMARK(BM_SampleCircuit);

void BM_PecSamples(benchmark::State& state) {
  const Setup s = make(state.range(0) == 0 ? "two_spinless" : "three_spinless");
  const auto obs = pecsim::Observable::all_projectors(s.circuit.qubit_count);
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pecsim::run_pec_samples(s.circuit, s.noise, s.table, s.initial, obs, n, 300, 3));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(1));
}
BENCHMARK(BM_PecSamples)->Args({0, 100})->Args({1, 100})->Unit(benchmark::kMillisecond);

void BM_PecExactOracle(benchmark::State& state) {
  const Setup s = make("three_spinless");
  for (auto _ : state) benchmark::DoNotOptimize(pecsim::pec_exact_oracle(s.circuit, s.noise, s.table, s.initial));
}
BENCHMARK(BM_PecExactOracle);

void BM_DecomposeInverse(benchmark::State& state) {
  const auto ptm = pecsim::pauli_channel_ptm(pecsim::PauliChannel::depolarizing(2, 0.0252));
  for (auto _ : state) benchmark::DoNotOptimize(pecsim::decompose_inverse(ptm));
}
BENCHMARK(BM_DecomposeInverse);

}  // namespace

BENCHMARK_MAIN();
