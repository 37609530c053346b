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

#include <random>
#include <vector>

#include "pecsim/postproc.hpp"
#include "pecsim/simulate.hpp"

namespace {

void BM_MleProject(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(1.0 / static_cast<double>(n), 0.2);
  std::vector<double> raw(n);
  for (double& x : raw) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(pecsim::mle_project(raw));
}
BENCHMARK(BM_MleProject)->Arg(4)->Arg(8)->Arg(16);

void BM_BootstrapShots(benchmark::State& state) {
  const std::vector<double> pops{0.1, 0.4, 0.4, 0.1};
  const pecsim::ShotCounts counts = pecsim::sample_shots(pops, 3000, 5);
  const pecsim::CountsPipeline pipeline = [](const pecsim::ShotCounts& c) {
    const pecsim::RealVector f = c.frequencies();
    const pecsim::RealVector p = pecsim::mle_project({f.data(), static_cast<std::size_t>(f.size())});
    return std::vector<double>(p.data(), p.data() + p.size());
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(pecsim::bootstrap_shots(counts, pipeline, static_cast<int>(state.range(0)), 9));
  }
}
BENCHMARK(BM_BootstrapShots)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
