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

#include "pecsim/pec.hpp"

#include <bit>
#include <cmath>

#include "parallel.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/rng.hpp"

namespace pecsim {
namespace {

std::vector<RealMatrix> insertion_ptms(int qubit_count) {
  std::vector<RealMatrix> out;
  for (std::size_t a = 0; a < pauli_dimension(qubit_count); ++a) {
    out.push_back(pauli_operator_ptm(qubit_count, a).matrix());
  }
  return out;
}

double diagonal_pauli_value(std::span<const double> populations, std::size_t pauli_index,
                            int qubit_count) {
  std::size_t zmask = 0;
  for (int q = 0; q < qubit_count; ++q) {
    if (pauli_digit(pauli_index, q, qubit_count) == Pauli::Z) {
      zmask |= std::size_t{1} << (qubit_count - 1 - q);
    }
  }
  double value = 0.0;
  for (std::size_t x = 0; x < populations.size(); ++x) {
    value += (std::popcount(x & zmask) & 1) ? -populations[x] : populations[x];
  }
  return value;
}

void check_observables(const std::vector<Observable>& observables, int qubit_count) {
  for (const auto& o : observables) {
    if (o.qubit_count != qubit_count) {
      throw Error(ErrorCode::kInvalidObservable,
                  "observable " + o.label() + " does not match the circuit width");
    }
  }
}

}  // namespace

Observable Observable::projector(std::string_view basis_label_text) {
  Observable o;
  o.kind = Kind::kProjector;
  o.index = basis_index(basis_label_text);
  o.qubit_count = static_cast<int>(basis_label_text.size());
  return o;
}

Observable Observable::pauli(std::string_view pauli_label) {
  const PauliString p = PauliString::parse(pauli_label);
  Observable o;
  o.kind = Kind::kPauli;
  o.index = p.index();
  o.qubit_count = p.qubit_count();
  return o;
}

std::vector<Observable> Observable::all_projectors(int qubit_count) {
  std::vector<Observable> out;
  for (std::size_t x = 0; x < ipow(2, qubit_count); ++x) {
    out.push_back(projector(basis_label(x, qubit_count)));
  }
  return out;
}

std::string Observable::label() const {
  if (kind == Kind::kProjector) return "P" + basis_label(index, qubit_count);
  return PauliString::from_index(qubit_count, index).str();
}

double expectation(const PauliVector& state, const Observable& observable) {
  if (observable.qubit_count != state.qubit_count()) {
    throw Error(ErrorCode::kInvalidObservable, "observable width mismatch");
  }
  if (observable.kind == Observable::Kind::kPauli) return state[observable.index];
  return populations_from_pauli_vector(state)(static_cast<Eigen::Index>(observable.index));
}

// ---------------------------------------------------------------------------

PecSampler::PecSampler(const Circuit& base, const DecompositionTable& decomps) {
  for (const EntanglingGate* g : base.entangling_gates()) {
    const QuasiProbDecomposition& d = find_decomposition(decomps, *g);
    std::vector<double> cdf(d.p.size());
    double running = 0.0;
    for (std::size_t a = 0; a < d.p.size(); ++a) {
      running += d.p[a];
      cdf[a] = running;
    }
    cdfs_.push_back(std::move(cdf));
    signs_.push_back(d.signs);
    cost_ *= d.cost;
  }
}

SampledCircuit PecSampler::sample(std::uint64_t master_seed, std::size_t sample_index) const {
  SampledCircuit sc;
  sc.sample_seed = derive_seed(master_seed, sample_index);
  Rng rng(sc.sample_seed);
  sc.insertions.reserve(cdfs_.size());
  for (std::size_t g = 0; g < cdfs_.size(); ++g) {
    const std::size_t a = rng.categorical(cdfs_[g]);
    sc.insertions.push_back(a);
    sc.sign *= signs_[g][a];
  }
  return sc;
}

SampledCircuit sample_circuit(const Circuit& base, const DecompositionTable& decomps,
                              std::uint64_t master_seed, std::size_t sample_index) {
  return PecSampler(base, decomps).sample(master_seed, sample_index);
}

PecRun run_pec_samples(const Circuit& base, const NoiseModel& nm, const DecompositionTable& decomps,
                       const PauliVector& initial, const std::vector<Observable>& observables,
                       std::size_t samples, std::int64_t shots, std::uint64_t master_seed) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one PEC sample");
  if (shots < 0) throw Error(ErrorCode::kInvalidArgument, "negative shot count");
  check_observables(observables, base.qubit_count);
  if (shots > 0) nm.validate_readout(base.qubit_count);

  const PecSampler sampler(base, decomps);
  const PtmProgram program = lower_to_ptm(base, &nm);
  const std::vector<RealMatrix> paulis = insertion_ptms(2);
  const int n = base.qubit_count;

  PecRun run;
  run.cost = sampler.cost();
  run.shots = shots;
  for (const auto& o : observables) run.observables.push_back(o.label());
  run.samples.resize(samples);

  detail::parallel_for(samples, [&](std::size_t s) {
    const SampledCircuit sc = sampler.sample(master_seed, s);
    std::vector<RealMatrix> after;
    after.reserve(sc.insertions.size());
    for (std::size_t a : sc.insertions) after.push_back(paulis[a]);
    const PauliVector state = run_program(program, initial, after);
    const RealVector exact_pops = populations_from_pauli_vector(state);

    PecSample rec;
    rec.sample_index = s;
    rec.sign = sc.sign;
    rec.insertions = sc.insertions;
    if (shots == 0) {
      rec.populations = exact_pops;
      for (const auto& o : observables) rec.values.push_back(expectation(state, o));
    } else {
      const RealVector read = apply_readout_error(
          std::span<const double>(exact_pops.data(), static_cast<std::size_t>(exact_pops.size())),
          nm, ReadoutDirection::kCorrupt);
      rec.counts = sample_shots(std::span<const double>(read.data(), static_cast<std::size_t>(read.size())),
                                shots, derive_seed(sc.sample_seed, 1));
      rec.populations = correct_counts(rec.counts, nm);
      const std::span<const double> pops(rec.populations.data(),
                                         static_cast<std::size_t>(rec.populations.size()));
      for (std::size_t k = 0; k < observables.size(); ++k) {
        const Observable& o = observables[k];
        if (o.kind == Observable::Kind::kProjector) {
          rec.values.push_back(pops[o.index]);
        } else if (PauliString::from_index(n, o.index).is_diagonal()) {
          rec.values.push_back(diagonal_pauli_value(pops, o.index, n));
        } else {
          // Measured in its own rotated basis: binomial +-1 outcomes.
          const double p_plus = std::clamp((1.0 + state[o.index]) / 2.0, 0.0, 1.0);
          Rng rng(derive_seed(sc.sample_seed, 2, k));
          std::int64_t plus = 0;
          for (std::int64_t t = 0; t < shots; ++t) plus += rng.uniform() < p_plus ? 1 : 0;
          rec.values.push_back(2.0 * static_cast<double>(plus) / static_cast<double>(shots) - 1.0);
        }
      }
    }
    run.samples[s] = std::move(rec);
  });
  return run;
}

std::vector<PecEstimate> summarize(const PecRun& run) {
  const std::size_t ns = run.samples.size();
  if (ns == 0) throw Error(ErrorCode::kInsufficientData, "no PEC samples");
  std::vector<PecEstimate> out;
  for (std::size_t k = 0; k < run.observables.size(); ++k) {
    double sum = 0.0;
    for (const auto& s : run.samples) sum += s.sign * s.values[k];
    const double mean = sum / static_cast<double>(ns);
    double ss = 0.0;
    for (const auto& s : run.samples) {
      const double d = s.sign * s.values[k] - mean;
      ss += d * d;
    }
    const double sd = ns > 1 ? std::sqrt(ss / static_cast<double>(ns - 1)) : 0.0;
    PecEstimate e;
    e.observable = run.observables[k];
    e.value = run.cost * mean;
    e.samples = ns;
    e.shots = run.shots;
    e.standard_error = run.cost * sd / std::sqrt(static_cast<double>(ns));
    e.cost = run.cost;
    out.push_back(std::move(e));
  }
  return out;
}

RealVector signed_populations(const PecRun& run, std::span<const std::size_t> sample_indices) {
  if (sample_indices.empty() || run.samples.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no PEC samples");
  }
  RealVector sum = RealVector::Zero(run.samples.front().populations.size());
  for (std::size_t i : sample_indices) {
    const PecSample& s = run.samples.at(i);
    sum += static_cast<double>(s.sign) * s.populations;
  }
  return run.cost * sum / static_cast<double>(sample_indices.size());
}

RealVector signed_populations(const PecRun& run) {
  std::vector<std::size_t> all(run.samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return signed_populations(run, all);
}

std::vector<PecEstimate> estimate(const Circuit& base, const NoiseModel& nm,
                                  const DecompositionTable& decomps, const PauliVector& initial,
                                  const std::vector<Observable>& observables, std::size_t samples,
                                  std::int64_t shots, std::uint64_t master_seed) {
  return summarize(
      run_pec_samples(base, nm, decomps, initial, observables, samples, shots, master_seed));
}

RealVector pec_exact_oracle(const Circuit& base, const NoiseModel& nm,
                            const DecompositionTable& decomps, const PauliVector& initial) {
  std::vector<RealMatrix> inverse_errors;
  for (const EntanglingGate* g : base.entangling_gates()) {
    inverse_errors.push_back(recompose(find_decomposition(decomps, *g)).matrix());
  }
  const PauliVector out = run_program(lower_to_ptm(base, &nm), initial, inverse_errors);
  return populations_from_pauli_vector(out);
}

double enumerate_exact(const Circuit& base, const NoiseModel& nm, const DecompositionTable& decomps,
                       const PauliVector& initial, const Observable& observable) {
  const auto gates = base.entangling_gates();
  if (gates.size() > 2) {
    throw Error(ErrorCode::kTooManyGates,
                "enumeration supports at most 2 entangling gates, circuit has " +
                    std::to_string(gates.size()));
  }
  check_observables({observable}, base.qubit_count);
  const PtmProgram program = lower_to_ptm(base, &nm);
  if (gates.empty()) return expectation(run_program(program, initial), observable);

  std::vector<const QuasiProbDecomposition*> ds;
  for (const EntanglingGate* g : gates) ds.push_back(&find_decomposition(decomps, *g));
  const std::vector<RealMatrix> paulis = insertion_ptms(2);
  const std::size_t terms = ipow(16, static_cast<int>(gates.size()));

  double total = 0.0;
  std::vector<RealMatrix> after(gates.size());
  for (std::size_t code = 0; code < terms; ++code) {
    double weight = 1.0;
    std::size_t rem = code;
    for (std::size_t g = 0; g < gates.size(); ++g) {
      const std::size_t a = rem % 16;
      rem /= 16;
      weight *= ds[g]->q[a];
      after[g] = paulis[a];
    }
    if (weight == 0.0) continue;
    total += weight * expectation(run_program(program, initial, after), observable);
  }
  return total;
}

}  // namespace pecsim
