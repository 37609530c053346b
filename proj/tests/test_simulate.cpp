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

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/hubbard.hpp"
#include "pecsim/serialization.hpp"
#include "pecsim/simulate.hpp"

using namespace pecsim;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

Circuit two_spinless_circuit(int steps) {
  const PauliHamiltonian h = build_hamiltonian({2, Components::kOne, 1.0, 0.0, 2.0});
  return compile_to_native(trotter_circuit(h, 2.0 * (std::numbers::pi / 4.0) * steps, steps));
}

std::vector<double> random_weights(std::mt19937_64& rng, int n, double strength) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto d = static_cast<std::size_t>(oracle::dim4(n));
  std::vector<double> w(d);
  double rest = 0.0;
  for (std::size_t a = 1; a < d; ++a) rest += (w[a] = u(rng));
  for (std::size_t a = 1; a < d; ++a) w[a] *= strength / rest;
  w[0] = 1.0 - strength;
  return w;
}

struct RandomCase {
  Circuit circuit;
  NoiseModel noise;
  std::map<std::string, std::vector<double>> weights;
};

RandomCase random_case(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  RandomCase rc;
  rc.circuit.qubit_count = n;
  for (int g = 0; g < 12; ++g) {
    if (g % 3 == 2) {
      int a = qubit(rng);
      int b = qubit(rng);
      while (b == a) b = qubit(rng);
      const auto kind = static_cast<EntanglerKind>(g % 2 == 0 ? 1 : 0);
      const std::string id = "g" + std::to_string(g);
      rc.circuit.gates.emplace_back(EntanglingGate{kind, angle(rng), a, b, id});
      rc.weights[id] = random_weights(rng, 2, 0.1);
      rc.noise.per_gate.insert_or_assign(id, PauliChannel(2, rc.weights[id]));
    } else {
      rc.circuit.gates.emplace_back(
          SingleQubitRotation{static_cast<Axis>(g % 3 == 0 ? 0 : 2), angle(rng), qubit(rng)});
    }
  }
  return rc;
}

oracle::CMat oracle_noisy_density(const RandomCase& rc, oracle::CMat rho) {
  const int n = rc.circuit.qubit_count;
  for (const auto& g : rc.circuit.gates) {
    if (const auto* r = std::get_if<SingleQubitRotation>(&g)) {
      const oracle::CMat u =
          oracle::embed_unitary(oracle::rotation(axis_char(r->axis), r->angle), {r->qubit}, n);
      rho = u * rho * u.adjoint();
    } else {
      const auto& e = std::get<EntanglingGate>(g);
      const oracle::CMat u = oracle::embed_unitary(
          oracle::entangler(entangler_name(e.kind)[0], e.angle), {e.first, e.second}, n);
      rho = u * rho * u.adjoint();
      rho = oracle::apply_pauli_channel(rho, rc.weights.at(e.gate_id), {e.first, e.second}, n);
    }
  }
  return rho;
}

oracle::CMat kron_confusion(const std::vector<Confusion>& c) {
  oracle::CMat m = oracle::CMat::Identity(1, 1);
  for (const auto& q : c) m = oracle::kron(m, q.cast<std::complex<double>>());
  return m;
}

double number_sector_leakage(const RealVector& p, int particles) {
  double mass = 0.0;
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (std::popcount(static_cast<unsigned>(x)) != particles) mass += p(x);
  }
  return mass;
}

}  // namespace

TEST(BasisLabels, QubitZeroIsLeftmost) {
  EXPECT_EQ(basis_label(2, 2), "10");
  EXPECT_EQ(basis_label(1, 3), "001");
  EXPECT_EQ(basis_index("110"), 6u);
  EXPECT_EQ(basis_state("01")(1), std::complex<double>(1.0, 0.0));
  const std::vector<std::string> labels{"11", "10"};
  const ComplexVector s = superposition(labels);
  EXPECT_NEAR(std::norm(s(3)), 0.5, 1e-15);
  EXPECT_NEAR(std::norm(s(2)), 0.5, 1e-15);
}

TEST(EvolveExact, ZeroTimeIsIdentity) {
  const PauliHamiltonian h = build_hamiltonian({3, Components::kOne, 1.0, 0.0, 2.0});
  const ComplexVector psi = basis_state("101");
  EXPECT_LT((evolve_exact(h, 0.0, psi) - psi).norm(), 1e-14);
}

TEST(EvolveExact, SingleFermionHopsAsCosineSquared) {
  for (double v : {0.0, 2.0, -1.3}) {
    const PauliHamiltonian h = build_hamiltonian({2, Components::kOne, 1.0, 0.0, v});
    for (double t : {0.1, 0.7, 1.9, 3.3}) {
      const ComplexVector out = evolve_exact(h, t, basis_state("10"));
      EXPECT_NEAR(std::norm(out(2)), std::pow(std::cos(t), 2), 1e-12);
      EXPECT_NEAR(out.norm(), 1.0, 1e-10);
    }
  }
}

TEST(EvolveExact, DoublyOccupiedStateIsStatic) {
  const PauliHamiltonian h = build_hamiltonian({2, Components::kOne, 1.0, 0.0, 2.0});
  for (double t : {0.3, 1.0, 5.0}) {
    EXPECT_NEAR(std::norm(evolve_exact(h, t, basis_state("11"))(3)), 1.0, 1e-12);
  }
}

TEST(EvolveExact, MatchesOracleExponential) {
  const HubbardSpec s{2, Components::kTwo, 1.0, 2.0, 0.0};
  const ComplexVector psi = superposition(std::vector<std::string>{"1001", "1010"});
  const oracle::CVec ref =
      oracle::evolve(oracle::jordan_wigner(2, true, 1.0, 2.0, 0.0), 1.234, psi);
  // Same Hamiltonian up to a constant offset: populations must agree.
  EXPECT_LT((probabilities(evolve_exact(build_hamiltonian(s), 1.234, psi)) -
             oracle::populations(ref))
                .norm(),
            1e-12);
}

TEST(RunIdeal, EmptyCircuit) {
  Circuit c;
  c.qubit_count = 2;
  const RealVector p = run_ideal(c, basis_state("00"));
  EXPECT_EQ(p, (RealVector(4) << 1, 0, 0, 0).finished());
}

TEST(RunIdeal, TwoSpinlessDoubleOccupancyIsConstant) {
  const ComplexVector psi = superposition(std::vector<std::string>{"11", "10"});
  for (int m = 1; m <= 8; ++m) {
    EXPECT_NEAR(run_ideal(two_spinless_circuit(m), psi)(3), 0.5, 1e-12) << m;
  }
}

TEST(RunIdeal, ConvergesToExactEvolution) {
  const PauliHamiltonian h = build_hamiltonian({3, Components::kOne, 1.0, 0.0, 2.0});
  const ComplexVector psi = superposition(std::vector<std::string>{"101", "110"});
  const double t = 1.5;
  const RealVector exact = probabilities(evolve_exact(h, t, psi));
  double prev = 0.0;
  for (int m : {16, 32, 64, 128}) {
    const double d = (run_ideal(compile_to_native(trotter_circuit(h, t, m)), psi) - exact).norm();
    if (prev > 0.0) EXPECT_NEAR(prev / d, 2.0, 0.2) << m;
    prev = d;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(PauliVector, Populations) {
  const RealVector uniform = populations_from_pauli_vector(PauliVector::maximally_mixed(2));
  EXPECT_LT((uniform - RealVector::Constant(4, 0.25)).norm(), 1e-15);
  const RealVector p = populations_from_pauli_vector(PauliVector::from_state(basis_state("01")));
  EXPECT_LT((p - (RealVector(4) << 0, 1, 0, 0).finished()).norm(), 1e-15);
}

TEST(PauliVector, DensityRoundTripAgainstOracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  ComplexVector psi(8);
  for (auto& a : psi) a = {g(rng), g(rng)};
  psi.normalize();
  const PauliVector v = PauliVector::from_state(psi);
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  for (std::size_t i = 0; i < 64; ++i) {
    const double expect =
        (oracle::pauli(oracle::label(i, 3)) * psi * psi.adjoint()).trace().real();
    EXPECT_NEAR(v[i], expect, 1e-12);
  }
  EXPECT_LT((v.density() - psi * psi.adjoint()).norm(), 1e-12);
  EXPECT_NEAR(v.min_eigenvalue(), 0.0, 1e-10);
}

TEST(PauliVector, PseudoStateKeepsNegativePopulations) {
  // Over-correct a dephased state by inverting a stronger channel than was applied.
  const PauliVector base = PauliVector::from_state(basis_state("01"));
  RealVector c = base.coefficients();
  for (Eigen::Index i = 1; i < c.size(); ++i) c(i) *= 1.06;
  const RealVector p = populations_from_pauli_vector(PauliVector(2, c));
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_LT(p.minCoeff(), -0.01);
}

TEST(RunNoisyPtm, IdentityNoiseEqualsIdeal) {
  for (int m : {1, 4, 8}) {
    const Circuit c = two_spinless_circuit(m);
    const ComplexVector psi = superposition(std::vector<std::string>{"11", "10"});
    const PauliVector out = run_noisy_ptm(c, NoiseModel::identity(), PauliVector::from_state(psi));
    EXPECT_LT((populations_from_pauli_vector(out) - run_ideal(c, psi)).norm(), 1e-10);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RandomCase rc = random_case(seed, 3);
    const ComplexVector psi = basis_state("000");
    const PauliVector out =
        run_noisy_ptm(rc.circuit, NoiseModel::uniform(PauliChannel::identity(2)),
                      PauliVector::from_state(psi));
    EXPECT_LT((populations_from_pauli_vector(out) - run_ideal(rc.circuit, psi)).norm(), 1e-10);
  }
}

TEST(RunNoisyPtm, DephasingKeepsPopulationsButShrinksCoherence) {
  Circuit c;
  c.qubit_count = 2;
  c.gates.emplace_back(EntanglingGate{EntanglerKind::kYY, std::numbers::pi / 4.0, 0, 1, "g"});
  const NoiseModel nm = NoiseModel::uniform(PauliChannel::from_terms(2, {{"II", 0.99}, {"ZI", 0.01}}));
  const PauliVector in = PauliVector::from_state(basis_state("00"));
  const PauliVector noisy = run_noisy_ptm(c, nm, in);
  const PauliVector ideal = run_noisy_ptm(c, NoiseModel::identity(), in);
  EXPECT_LT((populations_from_pauli_vector(noisy) - populations_from_pauli_vector(ideal)).norm(),
            1e-12);
  EXPECT_NEAR(std::abs(noisy.density()(0, 3)), 0.98 * std::abs(ideal.density()(0, 3)), 1e-12);
  EXPECT_GT(std::abs(ideal.density()(0, 3)), 0.4);
}

TEST(RunNoisyPtm, AgreesWithDensityOracleOnRandomCircuits) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = seed % 2 == 0 ? 2 : 3;
    const RandomCase rc = random_case(100 + seed, n);
    const ComplexVector psi = basis_state(std::string(static_cast<std::size_t>(n), '0'));
    const oracle::CMat rho0 = psi * psi.adjoint();
    const oracle::RVec ref = oracle::density_populations(oracle_noisy_density(rc, rho0));
    const RealVector ptm =
        populations_from_pauli_vector(run_noisy_ptm(rc.circuit, rc.noise, PauliVector::from_state(psi)));
    const RealVector dens = run_noisy_density(rc.circuit, rc.noise, rho0).diagonal().real();
    EXPECT_LT((ptm - ref).norm(), 1e-9) << seed;
    EXPECT_LT((dens - ref).norm(), 1e-9) << seed;
  }
}

TEST(RunNoisyPtm, TracePreservedAfterEveryGate) {
  const RandomCase rc = random_case(7, 3);
  PauliVector v = PauliVector::from_state(basis_state("010"));
  for (std::size_t k = 1; k <= rc.circuit.gates.size(); ++k) {
    Circuit prefix;
    prefix.qubit_count = 3;
    prefix.gates.assign(rc.circuit.gates.begin(),
                        rc.circuit.gates.begin() + static_cast<std::ptrdiff_t>(k));
    EXPECT_NEAR(run_noisy_ptm(prefix, rc.noise, v)[0], 1.0, 1e-15);
  }
}

TEST(RunNoisyPtm, MissingNoiseEntry) {
  Circuit c;
  c.qubit_count = 2;
  c.gates.emplace_back(EntanglingGate{EntanglerKind::kYY, 0.3, 0, 1, "YY(0,1)@0.300000"});
  NoiseModel nm;
  nm.per_gate.insert_or_assign("YY(1,2)", PauliChannel::identity(2));
  EXPECT_EQ(code_of([&] { run_noisy_ptm(c, nm, PauliVector::from_state(basis_state("00"))); }),
            ErrorCode::kMissingNoiseEntry);
  nm.per_gate.insert_or_assign("YY(0,1)", PauliChannel::depolarizing(2, 0.1));
  EXPECT_NO_THROW(run_noisy_ptm(c, nm, PauliVector::from_state(basis_state("00"))));
}

TEST(RunNoisyPtm, DepolarizingDecayIsModest) {
  const ComplexVector psi = superposition(std::vector<std::string>{"11", "10"});
  const NoiseModel nm = NoiseModel::uniform(PauliChannel::depolarizing(2, 0.0252));
  const double f_pro = 1.0 - 15.0 / 16.0 * 0.0252;
  double prev = 1.0;
  for (int m = 1; m <= 8; ++m) {
    const Circuit c = two_spinless_circuit(m);
    const RealVector noisy =
        populations_from_pauli_vector(run_noisy_ptm(c, nm, PauliVector::from_state(psi)));
    const double f = oracle::bhattacharyya_sq(noisy, run_ideal(c, psi));
    EXPECT_LT(f, prev);
    EXPECT_GT(f, std::pow(f_pro, 3 * m));
    prev = f;
  }
}

TEST(Leakage, ZNoiseStaysInSectorXNoiseLeaks) {
  // Channels act in the logical frame here, so the circuit is left uncompiled:
  // after compilation a Z error between basis changes is no longer diagonal.
  const ComplexVector psi = basis_state("10");
  const Circuit c = trotter_circuit(build_hamiltonian({2, Components::kOne, 1.0, 0.0, 2.0}),
                                    4.0 * std::numbers::pi / 2.0, 4);
  const NoiseModel z = NoiseModel::uniform(
      PauliChannel::from_terms(2, {{"II", 0.9}, {"ZI", 0.04}, {"IZ", 0.03}, {"ZZ", 0.03}}));
  const NoiseModel x = NoiseModel::uniform(PauliChannel::from_terms(2, {{"II", 0.95}, {"XI", 0.05}}));
  const PauliVector in = PauliVector::from_state(psi);
  EXPECT_LT(number_sector_leakage(populations_from_pauli_vector(run_noisy_ptm(c, z, in)), 1), 1e-12);
  EXPECT_GT(number_sector_leakage(populations_from_pauli_vector(run_noisy_ptm(c, x, in)), 1), 0.01);
}

TEST(Crosstalk, HitsSpectatorsOnly) {
  Circuit c;
  c.qubit_count = 3;
  c.gates.emplace_back(EntanglingGate{EntanglerKind::kYY, 0.0, 0, 1, "g"});
  NoiseModel nm = NoiseModel::identity();
  nm.crosstalk = PauliChannel::from_terms(1, {{"I", 0.9}, {"X", 0.1}});
  const RealVector p =
      populations_from_pauli_vector(run_noisy_ptm(c, nm, PauliVector::from_state(basis_state("000"))));
  EXPECT_NEAR(p(0), 0.9, 1e-12);
  EXPECT_NEAR(p(1), 0.1, 1e-12);
}

TEST(SampleShots, DegenerateDistribution) {
  const std::vector<double> p{1.0, 0.0, 0.0, 0.0};
  const ShotCounts s = sample_shots(p, 300, 5);
  EXPECT_EQ(s.counts, (std::vector<std::int64_t>{300, 0, 0, 0}));
  EXPECT_FALSE(s.clipped);
}

TEST(SampleShots, BinomialStatistics) {
  const std::vector<double> p{0.5, 0.5, 0.0, 0.0};
  double sum = 0.0;
  double sq = 0.0;
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    const double c = static_cast<double>(sample_shots(p, 300, static_cast<std::uint64_t>(s)).counts[0]);
    sum += c;
    sq += c * c;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt(sq / trials - mean * mean);
  EXPECT_NEAR(mean, 150.0, 0.6);
  EXPECT_NEAR(sd, std::sqrt(75.0), 0.4);
}

TEST(SampleShots, DeterministicAndClipping) {
  const std::vector<double> p{0.3, 0.3, -0.05, 0.45};
  const ShotCounts a = sample_shots(p, 1000, 99);
  const ShotCounts b = sample_shots(p, 1000, 99);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_TRUE(a.clipped);
  EXPECT_EQ(a.counts[2], 0);
  EXPECT_EQ(a.shots, 1000);
  EXPECT_NE(sample_shots(p, 1000, 100).counts, a.counts);
}

TEST(SampleShots, JsonRoundTrip) {
  const ShotCounts a = sample_shots(std::vector<double>{0.2, 0.3, 0.1, 0.4}, 300, 1);
  const ShotCounts b = from_json<ShotCounts>(to_json(a));
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.shots, b.shots);
}

TEST(Readout, IdentityIsNoOp) {
  NoiseModel nm;
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const RealVector out = apply_readout_error(p, nm, ReadoutDirection::kCorrupt);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(out(i), p[static_cast<std::size_t>(i)]);
}

TEST(Readout, CorruptMatchesOracleAndRoundTrips) {
  NoiseModel nm;
  Confusion a;
  a << 0.99, 0.02, 0.01, 0.98;
  Confusion b;
  b << 0.95, 0.03, 0.05, 0.97;
  nm.readout = {a, b, a};
  std::vector<double> p{0.05, 0.1, 0.15, 0.2, 0.1, 0.1, 0.1, 0.2};
  const RealVector corrupted = apply_readout_error(p, nm, ReadoutDirection::kCorrupt);
  const oracle::RVec ref =
      (kron_confusion(nm.readout) * Eigen::Map<const RealVector>(p.data(), 8).cast<std::complex<double>>())
          .real();
  EXPECT_LT((corrupted - ref).norm(), 1e-14);
  const std::vector<double> cv(corrupted.data(), corrupted.data() + corrupted.size());
  const RealVector back = apply_readout_error(cv, nm, ReadoutDirection::kCorrect);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(back(i), p[static_cast<std::size_t>(i)], 1e-10);
}

TEST(Readout, SingularConfusion) {
  NoiseModel nm;
  Confusion bad;
  bad << 0.5, 0.5, 0.5, 0.5;
  nm.readout = {bad, Confusion::Identity()};
  EXPECT_EQ(code_of([&] { nm.validate_readout(2); }), ErrorCode::kSingularConfusion);
  EXPECT_EQ(code_of([&] {
              apply_readout_error(std::vector<double>{1, 0, 0, 0}, nm, ReadoutDirection::kCorrect);
            }),
            ErrorCode::kSingularConfusion);
}

TEST(Readout, FiniteShotCorrectionCanGoNegative) {
  NoiseModel nm;
  Confusion a;
  a << 0.99, 0.02, 0.01, 0.98;
  nm.readout = {a, a};
  ShotCounts s;
  s.qubit_count = 2;
  s.shots = 300;
  s.counts = {300, 0, 0, 0};
  const RealVector f = correct_counts(s, nm);
  EXPECT_NEAR(f.sum(), 1.0, 1e-12);
  EXPECT_LT(f.minCoeff(), 0.0);
}

TEST(Readout, CorruptCountsFollowsConfusion) {
  NoiseModel nm;
  Confusion a;
  a << 0.9, 0.2, 0.1, 0.8;
  nm.readout = {a, Confusion::Identity()};
  ShotCounts s;
  s.qubit_count = 2;
  s.shots = 200000;
  s.counts = {200000, 0, 0, 0};
  const ShotCounts out = corrupt_counts(s, nm, 3);
  EXPECT_EQ(out.shots, s.shots);
  const double frac = static_cast<double>(out.counts[2]) / 200000.0;
  EXPECT_NEAR(frac, 0.1, 5.0 * std::sqrt(0.09 / 200000.0));
  EXPECT_EQ(out.counts[1] + out.counts[3], 0);
  EXPECT_EQ(corrupt_counts(s, nm, 3).counts, out.counts);
}
