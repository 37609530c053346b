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

#include "pecsim/characterize.hpp"

#include <algorithm>
#include <cmath>

#include "pecsim/errors.hpp"
#include "pecsim/rng.hpp"

namespace pecsim {
namespace {

constexpr double kMinSignal = 0.5;
constexpr double kExactConsistencyTol = 1e-9;
constexpr double kSampledConsistencySigmas = 5.0;
constexpr double kOffDiagonalTol = 1e-6;
constexpr double kMinEigenvalue = 1e-6;

std::vector<ProductEigenstate> all_product_eigenstates(int qubit_count) {
  std::vector<ProductEigenstate> out;
  const std::size_t total = ipow(6, qubit_count);
  for (std::size_t code = 0; code < total; ++code) {
    ProductEigenstate s;
    std::size_t rem = code;
    std::vector<std::size_t> digits(static_cast<std::size_t>(qubit_count));
    for (int q = qubit_count - 1; q >= 0; --q) {
      digits[static_cast<std::size_t>(q)] = rem % 6;
      rem /= 6;
    }
    for (std::size_t d : digits) {
      // Order per qubit: +Z, -Z, +X, -X, +Y, -Y.
      static constexpr Pauli kAxes[3] = {Pauli::Z, Pauli::X, Pauli::Y};
      s.axes.push_back(kAxes[d / 2]);
      s.signs.push_back(d % 2 == 0 ? 1 : -1);
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct Candidate {
  std::size_t input = 0;
  double ideal = 0.0;
};

// Shot-noise estimate of <P>: fraction of +1 outcomes mapped to [-1, 1].
double sample_expectation(double exact, std::int64_t shots, std::uint64_t seed) {
  const double p_plus = std::clamp((1.0 + exact) / 2.0, 0.0, 1.0);
  Rng rng(seed);
  std::int64_t plus = 0;
  for (std::int64_t s = 0; s < shots; ++s) {
    if (rng.uniform() < p_plus) ++plus;
  }
  return 2.0 * static_cast<double>(plus) / static_cast<double>(shots) - 1.0;
}

double estimate_sigma(double measured, double ideal, std::int64_t shots) {
  const double var = std::max(1.0 - measured * measured, 1.0 / static_cast<double>(shots));
  return std::sqrt(var / static_cast<double>(shots)) / std::abs(ideal);
}

}  // namespace

std::string ProductEigenstate::label() const {
  std::string s;
  for (std::size_t q = 0; q < axes.size(); ++q) {
    if (q > 0) s.push_back(',');
    s.push_back(signs[q] > 0 ? '+' : '-');
    s.push_back(pauli_char(axes[q]));
  }
  return s;
}

PauliVector ProductEigenstate::pauli_vector() const {
  const int n = static_cast<int>(axes.size());
  const std::size_t dim = pauli_dimension(n);
  RealVector c(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    double value = 1.0;
    for (int q = 0; q < n && value != 0.0; ++q) {
      const Pauli p = pauli_digit(i, q, n);
      if (p == Pauli::I) continue;
      value *= p == axes[static_cast<std::size_t>(q)] ? signs[static_cast<std::size_t>(q)] : 0.0;
    }
    c(static_cast<Eigen::Index>(i)) = value;
  }
  return PauliVector(n, std::move(c));
}

GateCharacterization characterize_gate(const EntanglingGate& gate, const NoiseModel& nm,
                                       std::int64_t shots_per_setting, std::uint64_t seed) {
  if (shots_per_setting < 0) throw Error(ErrorCode::kInvalidArgument, "negative shot count");
  const bool exact = shots_per_setting == 0;

  GateCharacterization out;
  out.gate_id = gate.gate_id;
  out.gate = gate;
  out.shots_per_setting = shots_per_setting;
  out.ideal = ptm_from_unitary(gate_unitary(Gate{gate}));

  EntanglingGate actual = gate;
  actual.angle += nm.overrotation_for(gate);
  const Ptm noisy_truth =
      ptm_compose(ptm_from_unitary(gate_unitary(Gate{actual})), pauli_channel_ptm(nm.channel_for(gate)));

  const std::vector<ProductEigenstate> inputs = all_product_eigenstates(2);
  std::vector<RealVector> ideal_out;
  std::vector<RealVector> noisy_out;
  for (const auto& in : inputs) {
    const RealVector c = in.pauli_vector().coefficients();
    ideal_out.push_back(out.ideal.matrix() * c);
    noisy_out.push_back(noisy_truth.matrix() * c);
  }

  const std::size_t dim = pauli_dimension(2);
  out.eigenvalues = RealVector::Ones(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 1; b < dim; ++b) {
    std::vector<Candidate> ranked;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      ranked.push_back({k, ideal_out[k](static_cast<Eigen::Index>(b))});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Candidate& x, const Candidate& y) {
      return std::abs(x.ideal) > std::abs(y.ideal) + 1e-12;
    });
    const Candidate& best = ranked.front();
    if (std::abs(best.ideal) < kMinSignal) {
      throw Error(ErrorCode::kDegenerateSetting,
                  "no input gives a usable signal for " + PauliString::from_index(2, b).str());
    }

    auto measure = [&](const Candidate& cand, std::uint64_t stream) {
      const double truth = noisy_out[cand.input](static_cast<Eigen::Index>(b));
      return exact ? truth
                   : sample_expectation(truth, shots_per_setting, derive_seed(seed, b, stream));
    };

    const double measured = measure(best, 0);
    const double lambda = measured / best.ideal;
    out.eigenvalues(static_cast<Eigen::Index>(b)) = lambda;
    out.settings.push_back({b, inputs[best.input], best.ideal, measured});

    // Held-out settings: a Pauli channel predicts the same lambda_b for every
    // input with usable signal.
    std::size_t checked = 0;
    for (std::size_t r = 1; r < ranked.size(); ++r) {
      if (std::abs(ranked[r].ideal) < kMinSignal) break;
      if (!exact && checked >= 1) break;
      const double held_measured = measure(ranked[r], 1 + checked);
      const double held_lambda = held_measured / ranked[r].ideal;
      const double tol =
          exact ? kExactConsistencyTol
                : kSampledConsistencySigmas *
                      std::hypot(estimate_sigma(measured, best.ideal, shots_per_setting),
                                 estimate_sigma(held_measured, ranked[r].ideal, shots_per_setting));
      if (std::abs(held_lambda - lambda) > tol) {
        throw Error(ErrorCode::kNonPauliError,
                    "gate " + gate.gate_id + ": inconsistent eigenvalue for " +
                        PauliString::from_index(2, b).str() + " (" + std::to_string(lambda) +
                        " vs " + std::to_string(held_lambda) + ")");
      }
      ++checked;
    }
  }
  out.estimated_noisy = Ptm(2, out.eigenvalues.asDiagonal() * out.ideal.matrix());
  return out;
}

Ptm error_operator(const Ptm& noisy, const Ptm& ideal) {
  if (noisy.qubit_count() != ideal.qubit_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "error operator of PTMs of different width");
  }
  return ptm_compose(ptm_inverse(ideal), noisy);
}

QuasiProbDecomposition decompose_inverse(const Ptm& error, const std::string& gate_id) {
  if (error.off_diagonal_norm() > kOffDiagonalTol) {
    throw Error(ErrorCode::kNonDiagonal, "error PTM has off-diagonal mass " +
                                             std::to_string(error.off_diagonal_norm()));
  }
  const int n = error.qubit_count();
  const std::size_t dim = pauli_dimension(n);
  if (std::abs(error(0, 0) - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "error PTM is not trace preserving");
  }
  std::vector<double> inv_lambda(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    const double lambda = b == 0 ? 1.0 : error(b, b);
    if (std::abs(lambda) < kMinEigenvalue) {
      throw Error(ErrorCode::kSingularEigenvalue,
                  "eigenvalue of " + PauliString::from_index(n, b).str() + " is " +
                      std::to_string(lambda));
    }
    inv_lambda[b] = 1.0 / lambda;
  }

  QuasiProbDecomposition d;
  d.gate_id = gate_id;
  d.qubit_count = n;
  d.q.assign(dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < dim; ++b) sum += commutation_sign(n, a, b) * inv_lambda[b];
    d.q[a] = sum / static_cast<double>(dim);
  }
  d.cost = 0.0;
  for (double q : d.q) d.cost += std::abs(q);
  d.p.resize(dim);
  d.signs.resize(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    d.p[a] = std::abs(d.q[a]) / d.cost;
    d.signs[a] = d.q[a] < 0.0 ? -1 : 1;
  }
  return d;
}

QuasiProbDecomposition decompose_characterization(const GateCharacterization& ch) {
  const Ptm err = error_operator(ch.estimated_noisy, ch.ideal);
  RealVector lambda = err.matrix().diagonal();
  bool clipped = false;
  for (Eigen::Index b = 1; b < lambda.size(); ++b) {
    const double c = std::clamp(lambda(b), kEigenvalueFloor, kEigenvalueCeiling);
    if (c != lambda(b)) clipped = true;
    lambda(b) = c;
  }
  lambda(0) = 1.0;
  // Off-diagonal round-off from the inverse is dropped with the clip.
  QuasiProbDecomposition d = decompose_inverse(Ptm::diagonal(err.qubit_count(), lambda), ch.gate_id);
  d.clipped = clipped;
  return d;
}

Ptm recompose(const QuasiProbDecomposition& d) {
  const std::size_t dim = pauli_dimension(d.qubit_count);
  RealVector diag = RealVector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < dim; ++a) {
    diag += d.q[a] * pauli_operator_ptm(d.qubit_count, a).matrix().diagonal();
  }
  return Ptm::diagonal(d.qubit_count, diag);
}

const QuasiProbDecomposition& find_decomposition(const DecompositionTable& table,
                                                 const EntanglingGate& gate) {
  if (auto it = table.find(gate.gate_id); it != table.end()) return it->second;
  throw Error(ErrorCode::kMissingDecomposition, "no decomposition for gate '" + gate.gate_id + "'");
}

double circuit_cost(const DecompositionTable& decomps, const Circuit& circuit) {
  double cost = 1.0;
  for (const EntanglingGate* g : circuit.entangling_gates()) {
    cost *= find_decomposition(decomps, *g).cost;
  }
  return cost;
}

}  // namespace pecsim
