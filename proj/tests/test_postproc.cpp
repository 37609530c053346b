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

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/hubbard.hpp"
#include "pecsim/postproc.hpp"
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

std::vector<double> vec(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

RealVector rv(std::initializer_list<double> xs) {
  RealVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ShotCounts counts_of(int qubits, std::vector<std::int64_t> c) {
  ShotCounts s;
  s.qubit_count = qubits;
  s.counts = std::move(c);
  for (auto v : s.counts) s.shots += v;
  return s;
}

}  // namespace

TEST(MleProject, Examples) {
  const std::vector<double> flat{0.25, 0.25, 0.25, 0.25};
  EXPECT_LT((mle_project(flat) - rv({0.25, 0.25, 0.25, 0.25})).norm(), 1e-15);
  EXPECT_LT((mle_project(std::vector<double>{1.1, -0.1, 0, 0}) - rv({1, 0, 0, 0})).norm(), 1e-15);
  EXPECT_LT((mle_project(std::vector<double>{0.6, 0.6, -0.2, 0}) - rv({0.5, 0.5, 0, 0})).norm(), 1e-15);
}

TEST(MleProject, MatchesOraclesAndIsIdempotent) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = trial % 2 == 0 ? 3 : 4;
    RealVector raw(n);
    for (auto& x : raw) x = 1.0 / n + g(rng);
    const std::vector<double> in = vec(raw);
    const RealVector out = mle_project(in);
    EXPECT_NEAR(out.sum(), 1.0, 1e-12);
    EXPECT_GE(out.minCoeff(), 0.0);
    EXPECT_LT((out - oracle::simplex_projection(raw)).norm(), 1e-12);
    EXPECT_LT((mle_project(vec(out)) - out).norm(), 1e-15);
    if (n == 3) {
      const RealVector grid = oracle::simplex_grid_3(raw, 1e-3);
      EXPECT_LE((out - raw).norm(), (grid - raw).norm() + 1e-12);
      EXPECT_LT((out - grid).cwiseAbs().maxCoeff(), 2e-3);
    }
  }
}

TEST(SymmetrySector, Construction) {
  const std::vector<std::string> labels{"110", "101", "011"};
  const SymmetrySector s = SymmetrySector::from_labels(labels);
  EXPECT_EQ(s.qubit_count, 3);
  EXPECT_EQ(s.allowed, (std::vector<std::size_t>{3, 5, 6}));
  EXPECT_TRUE(s.contains(5));
  EXPECT_FALSE(s.contains(7));

  const std::vector<std::size_t> support{basis_index("101"), basis_index("110")};
  EXPECT_EQ(SymmetrySector::matching(3, support, false).allowed, s.allowed);

  const std::vector<std::size_t> spin_support{basis_index("1001"), basis_index("1010")};
  const SymmetrySector spin = SymmetrySector::matching(4, spin_support, true);
  EXPECT_EQ(spin.labels(), (std::vector<std::string>{"0101", "0110", "1001", "1010"}));
  EXPECT_EQ(SymmetrySector::matching(4, spin_support, false).allowed.size(), 6u);
}

TEST(PostSelect, Examples) {
  const std::vector<std::string> one{"01", "10"};
  const SymmetrySector sector = SymmetrySector::from_labels(one);
  const PostSelection ps = post_select(std::vector<double>{0.1, 0.4, 0.4, 0.1}, sector);
  EXPECT_LT((ps.values - rv({0, 0.5, 0.5, 0})).norm(), 1e-15);
  EXPECT_NEAR(ps.leakage, 0.2, 1e-15);

  const PostSelection inside = post_select(std::vector<double>{0, 0.3, 0.7, 0}, sector);
  EXPECT_LT((inside.values - rv({0, 0.3, 0.7, 0})).norm(), 1e-15);
  EXPECT_EQ(inside.leakage, 0.0);

  const PostSelection twice = post_select(vec(ps.values), sector);
  EXPECT_LT((twice.values - ps.values).norm(), 1e-15);

  EXPECT_EQ(code_of([&] { post_select(std::vector<double>{0.5, 0, 0, 0.5}, sector); }), ErrorCode::kEmptySector);
}

TEST(PostSelect, FourQubitSpinSector) {
  const std::vector<std::string> labels{"0101", "0110", "1001", "1010"};
  const SymmetrySector sector = SymmetrySector::from_labels(labels);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVector p(16);
  for (auto& x : p) x = u(rng);
  p /= p.sum();
  const PostSelection ps = post_select(vec(p), sector);
  double in = 0.0;
  for (const auto& l : labels) in += p(static_cast<Eigen::Index>(basis_index(l)));
  EXPECT_NEAR(ps.leakage + in, 1.0, 1e-12);
  for (Eigen::Index x = 0; x < 16; ++x) {
    const bool allowed = sector.contains(static_cast<std::size_t>(x));
    EXPECT_NEAR(ps.values(x), allowed ? p(x) / in : 0.0, 1e-14);
  }
}

TEST(PopulationFidelity, Examples) {
  const std::vector<double> a{0.5, 0.5, 0, 0};
  const std::vector<double> b{0.25, 0.75, 0, 0};
  EXPECT_NEAR(population_fidelity(a, a), 1.0, 1e-15);
  EXPECT_NEAR(population_fidelity(std::vector<double>{1, 0, 0, 0}, std::vector<double>{0, 1, 0, 0}), 0.0, 1e-15);
  EXPECT_NEAR(population_fidelity(a, b), std::pow(std::sqrt(0.125) + std::sqrt(0.375), 2), 1e-14);
  EXPECT_NEAR(population_fidelity(a, b), 0.9330, 5e-5);
  EXPECT_NEAR(population_fidelity(a, b), population_fidelity(b, a), 1e-15);
}

TEST(PopulationFidelity, NormalizedVersusRaw) {
  // A PEC-like vector with too much mass on the ideal support and a negative entry.
  const std::vector<double> ideal{0.5, 0.5, 0, 0};
  const std::vector<double> pec{0.56, 0.52, -0.08, 0.0};
  const double norm = population_fidelity(pec, ideal);
  const double raw = population_fidelity(pec, ideal, FidelityMode::kRaw);
  EXPECT_LE(norm, 1.0);
  EXPECT_GT(raw, 1.0);
  RealVector clipped = rv({0.56, 0.52, 0, 0});
  clipped /= clipped.sum();
  EXPECT_NEAR(norm, oracle::bhattacharyya_sq(clipped, rv({0.5, 0.5, 0, 0})), 1e-14);
  EXPECT_NEAR(raw, oracle::bhattacharyya_sq(rv({0.56, 0.52, 0, 0}), rv({0.5, 0.5, 0, 0})), 1e-14);
  EXPECT_EQ(population_fidelity(std::vector<double>{-0.1, 0, 0, -0.2}, ideal), 0.0);
}

TEST(FitFidelity, RecoversPlantedExponential) {
  std::vector<double> steps;
  std::vector<double> f;
  for (int k = 1; k <= 8; ++k) {
    steps.push_back(k);
    f.push_back(std::pow(0.99, 3 * k));
  }
  const FidelityFit fit = fit_fidelity_per_gate(steps, f, 3);
  EXPECT_NEAR(fit.per_gate, 0.99, 1e-6);
  EXPECT_NEAR(fit.amplitude, 1.0, 1e-6);
  EXPECT_LT(fit.standard_error, 1e-6);

  std::vector<double> g;
  for (int k = 1; k <= 8; ++k) g.push_back(0.93 * std::pow(0.975, 6 * k));
  const FidelityFit fit2 = fit_fidelity_per_gate(steps, g, 6);
  EXPECT_NEAR(fit2.per_gate, 0.975, 1e-6);
  EXPECT_NEAR(fit2.amplitude, 0.93, 1e-6);
}

TEST(FitFidelity, NoisyDataGivesUncertainty) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> steps;
  std::vector<double> f;
  for (int k = 0; k <= 8; ++k) {
    steps.push_back(k);
    f.push_back(std::pow(0.9895, 3 * k) + noise(rng));
  }
  const FidelityFit fit = fit_fidelity_per_gate(steps, f, 3);
  EXPECT_GT(fit.standard_error, 0.0);
  EXPECT_LT(std::abs(fit.per_gate - 0.9895), 4.0 * fit.standard_error);
}

TEST(FitFidelity, FlatAndDegenerate) {
  const std::vector<double> steps{1, 2, 3, 4};
  const std::vector<double> ones{1, 1, 1, 1};
  EXPECT_NEAR(fit_fidelity_per_gate(steps, ones, 3).per_gate, 1.0, 1e-12);
  const std::vector<double> two{1, 2};
  EXPECT_EQ(code_of([&] { fit_fidelity_per_gate(two, std::vector<double>{1, 1}, 3); }),
            ErrorCode::kFitDegenerate);
  const std::vector<double> same{2, 2, 2};
  EXPECT_EQ(code_of([&] { fit_fidelity_per_gate(same, std::vector<double>{0.9, 0.8, 0.7}, 3); }),
            ErrorCode::kFitDegenerate);
}

TEST(SpinCharge, Definitions) {
  const SpinLayout layout = SpinLayout::chain(2);
  EXPECT_EQ(layout.up, (std::vector<int>{0, 1}));
  EXPECT_EQ(layout.down, (std::vector<int>{2, 3}));
  RealVector p = RealVector::Zero(16);
  p(static_cast<Eigen::Index>(basis_index("1010"))) = 1.0;
  SpinCharge sc = spin_charge(vec(p), layout, 0);
  EXPECT_DOUBLE_EQ(sc.spin, 0.0);
  EXPECT_DOUBLE_EQ(sc.charge, 2.0);
  p.setZero();
  p(static_cast<Eigen::Index>(basis_index("1001"))) = 1.0;
  sc = spin_charge(vec(p), layout, 0);
  EXPECT_DOUBLE_EQ(sc.spin, 1.0);
  EXPECT_DOUBLE_EQ(sc.charge, 1.0);
  sc = spin_charge(vec(p), layout, 1);
  EXPECT_DOUBLE_EQ(sc.spin, -1.0);
  EXPECT_DOUBLE_EQ(sc.charge, 1.0);
  EXPECT_EQ(code_of([&] { spin_charge(vec(p), layout, 2); }), ErrorCode::kBadLayout);
  EXPECT_EQ(code_of([&] { spin_charge(std::vector<double>(8, 0.125), layout, 0); }), ErrorCode::kBadLayout);
}

TEST(SpinCharge, IsLinear) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVector a(16);
  RealVector b(16);
  for (auto& x : a) x = u(rng);
  for (auto& x : b) x = u(rng);
  a /= a.sum();
  b /= b.sum();
  const SpinLayout layout = SpinLayout::chain(2);
  const SpinCharge sa = spin_charge(vec(a), layout, 1);
  const SpinCharge sb = spin_charge(vec(b), layout, 1);
  const SpinCharge mix = spin_charge(vec(0.3 * a + 0.7 * b), layout, 1);
  EXPECT_NEAR(mix.spin, 0.3 * sa.spin + 0.7 * sb.spin, 1e-14);
  EXPECT_NEAR(mix.charge, 0.3 * sa.charge + 0.7 * sb.charge, 1e-14);
}

TEST(SpinCharge, ChangesCoincideWithoutOnsiteInteraction) {
  const std::vector<std::string> init{"1001", "1010"};
  const ComplexVector psi = superposition(init);
  const SpinLayout layout = SpinLayout::chain(2);
  auto series = [&](double u) {
    std::vector<SpinCharge> out;
    const PauliHamiltonian h = build_hamiltonian({2, Components::kTwo, 1.0, u, 0.0});
    for (int m = 0; m <= 4; ++m) {
      Circuit c;
      c.qubit_count = 4;
      if (m > 0) c = compile_to_native(trotter_circuit(h, 2.0 * std::numbers::pi / 8.0 * m, m));
      out.push_back(spin_charge(vec(run_ideal(c, psi)), layout, 0));
    }
    return out;
  };
  const auto free = series(0.0);
  double max_gap = 0.0;
  for (const auto& sc : free) {
    EXPECT_NEAR(sc.spin - free[0].spin, sc.charge - free[0].charge, 1e-9);
  }
  const auto interacting = series(2.0);
  for (const auto& sc : interacting) {
    max_gap = std::max(max_gap, std::abs((sc.spin - interacting[0].spin) - (sc.charge - interacting[0].charge)));
  }
  EXPECT_GT(max_gap, 0.05);
}

TEST(Bootstrap, ZeroVarianceData) {
  const ShotCounts s = counts_of(1, {300, 0});
  const BootstrapResult r = bootstrap_shots(
      s, [](const ShotCounts& c) { return std::vector<double>{c.frequencies()(0)}; }, 200, 1);
  EXPECT_EQ(r.replicates, 200u);
  EXPECT_EQ(r.point[0], 1.0);
  EXPECT_EQ(r.stddev[0], 0.0);
  EXPECT_EQ(r.err_lo[0], 0.0);
  EXPECT_EQ(r.err_hi[0], 0.0);
}

TEST(Bootstrap, BernoulliMeanMatchesAnalyticError) {
  const ShotCounts s = counts_of(1, {150, 150});
  const BootstrapResult r = bootstrap_shots(
      s, [](const ShotCounts& c) { return std::vector<double>{c.frequencies()(0)}; }, 1000, 7);
  const double analytic = std::sqrt(0.25 / 300.0);
  EXPECT_NEAR(analytic, 0.0289, 1e-4);
  EXPECT_NEAR(r.stddev[0], analytic, 0.2 * analytic);
  EXPECT_GT(r.err_lo[0], 0.0);
  EXPECT_GT(r.err_hi[0], 0.0);
}

TEST(Bootstrap, AsymmetricBarsAtTheBoundary) {
  const std::vector<double> ideal{0.5, 0.5, 0, 0};
  const ShotCounts s = counts_of(2, {150, 150, 0, 0});
  const BootstrapResult r = bootstrap_shots(
      s,
      [&](const ShotCounts& c) {
        return std::vector<double>{population_fidelity(vec(c.frequencies()), ideal)};
      },
      500, 3);
  EXPECT_NEAR(r.point[0], 1.0, 1e-15);
  EXPECT_LE(r.err_hi[0], r.err_lo[0]);
  EXPECT_GT(r.err_lo[0], 0.0);
}

TEST(Bootstrap, ReproducibleAndScalesWithShots) {
  auto width = [](std::int64_t shots, std::uint64_t seed) {
    const ShotCounts s = counts_of(1, {shots * 3 / 10, shots - shots * 3 / 10});
    return bootstrap_shots(
               s, [](const ShotCounts& c) { return std::vector<double>{c.frequencies()(0)}; }, 1000, seed)
        .stddev[0];
  };
  EXPECT_EQ(width(300, 5), width(300, 5));
  EXPECT_NEAR(width(300, 5) / width(1200, 6), 2.0, 0.4);
}

TEST(Bootstrap, RecordsResampling) {
  // Mean of records with values 0..9: bootstrap std matches sd / sqrt(n).
  std::vector<double> values(10);
  for (std::size_t i = 0; i < 10; ++i) values[i] = static_cast<double>(i);
  const BootstrapResult r = bootstrap_records(
      values.size(),
      [&](std::span<const std::size_t> idx) {
        double s = 0.0;
        for (std::size_t i : idx) s += values[i];
        return std::vector<double>{s / static_cast<double>(idx.size())};
      },
      2000, 11);
  EXPECT_NEAR(r.point[0], 4.5, 1e-15);
  const double analytic = std::sqrt(8.25 / 10.0);
  EXPECT_NEAR(r.stddev[0], analytic, 0.1 * analytic);
  EXPECT_EQ(code_of([&] {
              bootstrap_records(0, [](std::span<const std::size_t>) { return std::vector<double>{}; }, 200, 1);
            }),
            ErrorCode::kInsufficientData);
  EXPECT_THROW(bootstrap_records(10, [](std::span<const std::size_t>) { return std::vector<double>{0}; }, 10, 1),
               Error);
}

TEST(Stages, NamesRoundTrip) {
  for (Stage s : {Stage::kIdeal, Stage::kNoisy, Stage::kRaw, Stage::kPec, Stage::kMle, Stage::kPs}) {
    EXPECT_EQ(parse_stage(stage_name(s)), s);
  }
  EXPECT_THROW(parse_stage("bogus"), Error);
}
