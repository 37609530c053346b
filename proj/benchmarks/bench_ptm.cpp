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

#include <numbers>

#include "pecsim/hubbard.hpp"
#include "pecsim/simulate.hpp"

namespace {

pecsim::Circuit chain_circuit(int qubits, int steps) {
  const pecsim::Components comp = qubits == 4 ? pecsim::Components::kTwo : pecsim::Components::kOne;
  const int sites = qubits == 4 ? 2 : qubits;
  const auto h = pecsim::build_hamiltonian({sites, comp, 1.0, 2.0, 2.0});
  return pecsim::compile_to_native(pecsim::trotter_circuit(h, steps * std::numbers::pi / 4.0, steps));
}

void BM_NoisyPtm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const pecsim::Circuit c = chain_circuit(n, 4);
  const auto nm = pecsim::NoiseModel::uniform(pecsim::PauliChannel::depolarizing(2, 0.0252));
  const auto in = pecsim::PauliVector::from_state(pecsim::basis_state(std::string(n, '1').replace(0, 1, "0")));
  for (auto _ : state) benchmark::DoNotOptimize(pecsim::run_noisy_ptm(c, nm, in));
  state.counters["entanglers"] = static_cast<double>(c.entangling_count());
}
BENCHMARK(BM_NoisyPtm)->Arg(2)->Arg(3)->Arg(4);

void BM_LoweredProgram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const pecsim::Circuit c = chain_circuit(n, 4);
  const auto nm = pecsim::NoiseModel::uniform(pecsim::PauliChannel::depolarizing(2, 0.0252));
  const pecsim::PtmProgram program = pecsim::lower_to_ptm(c, &nm);
  const auto in = pecsim::PauliVector::maximally_mixed(n);
  for (auto _ : state) benchmark::DoNotOptimize(pecsim::run_program(program, in));
}
BENCHMARK(BM_LoweredProgram)->Arg(2)->Arg(3)->Arg(4);

void BM_NoisyDensity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const pecsim::Circuit c = chain_circuit(n, 4);
  const auto nm = pecsim::NoiseModel::uniform(pecsim::PauliChannel::depolarizing(2, 0.0252));
  const pecsim::ComplexMatrix rho = pecsim::PauliVector::maximally_mixed(n).density();
  for (auto _ : state) benchmark::DoNotOptimize(pecsim::run_noisy_density(c, nm, rho));
}
BENCHMARK(BM_NoisyDensity)->Arg(2)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
