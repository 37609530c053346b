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

#include "pecsim/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

#include "pecsim/errors.hpp"
#include "pecsim/rng.hpp"

namespace pecsim {
namespace {

int width_of_dimension(std::size_t dim, std::size_t base) {
  int n = 0;
  while (ipow(base, n) < dim) ++n;
  if (ipow(base, n) != dim || n < 1 || n > kMaxQubits) {
    throw Error(ErrorCode::kSizeGuard, "dimension " + std::to_string(dim) +
                                           " is not a supported register size");
  }
  return n;
}

void check_normalized(const ComplexVector& state) {
  if (std::abs(state.norm() - 1.0) > kAlgebraTol) {
    throw Error(ErrorCode::kInvalidArgument, "initial state is not normalized");
  }
}

// Local PTM with the identity row pinned so trace preservation is exact.
RealMatrix pin_identity_row(RealMatrix m) {
  m.row(0).setZero();
  m(0, 0) = 1.0;
  return m;
}

RealMatrix local_ptm(const ComplexMatrix& unitary) {
  return pin_identity_row(ptm_from_unitary(unitary).matrix());
}

RealMatrix channel_matrix(const PauliChannel& ch) {
  RealVector lambda = ch.eigenvalues();
  lambda(0) = 1.0;
  return lambda.asDiagonal();
}

EntanglingGate with_overrotation(const EntanglingGate& e, const NoiseModel& nm) {
  EntanglingGate out = e;
  out.angle += nm.overrotation_for(e);
  return out;
}

template <typename Map>
auto lookup(const Map& map, const EntanglingGate& gate) -> const typename Map::mapped_type* {
  if (auto it = map.find(gate.gate_id); it != map.end()) return &it->second;
  if (auto it = map.find(pair_key(gate.kind, gate.first, gate.second)); it != map.end()) {
    return &it->second;
  }
  if (auto it = map.find("*"); it != map.end()) return &it->second;
  return nullptr;
}

// rho -> U rho U^dagger for a local unitary.
void conjugate_local(ComplexMatrix& rho, int n, std::span<const int> qubits,
                     const ComplexMatrix& local) {
  for (Eigen::Index col = 0; col < rho.cols(); ++col) {
    ComplexVector column = rho.col(col);
    apply_local(column, 2, n, qubits, local);
    rho.col(col) = column;
  }
  const ComplexMatrix local_conj = local.conjugate();
  for (Eigen::Index row = 0; row < rho.rows(); ++row) {
    ComplexVector r = rho.row(row).transpose();
    apply_local(r, 2, n, qubits, local_conj);
    rho.row(row) = r.transpose();
  }
}

// rho -> sum_a w_a P_a rho P_a with P_a acting on `qubits`.
void apply_pauli_channel_density(ComplexMatrix& rho, int n, std::span<const int> qubits,
                                 const PauliChannel& ch) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  const auto& w = ch.weights();
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (w[a] == 0.0) continue;
    const ComplexMatrix p = PauliString::from_index(ch.qubit_count(), a).matrix();
    ComplexMatrix term = rho;
    conjugate_local(term, n, qubits, p);
    out += w[a] * term;
  }
  rho = std::move(out);
}

}  // namespace

std::string basis_label(std::size_t index, int qubit_count) {
  std::string s(static_cast<std::size_t>(qubit_count), '0');
  for (int q = 0; q < qubit_count; ++q) {
    if ((index >> (qubit_count - 1 - q)) & 1U) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

std::size_t basis_index(std::string_view label) {
  if (label.empty() || label.size() > static_cast<std::size_t>(kMaxQubits)) {
    throw Error(ErrorCode::kInvalidArgument, "bad basis label '" + std::string(label) + "'");
  }
  std::size_t index = 0;
  for (char c : label) {
    if (c != '0' && c != '1') {
      throw Error(ErrorCode::kInvalidArgument, "bad basis label '" + std::string(label) + "'");
    }
    index = index * 2 + static_cast<std::size_t>(c - '0');
  }
  return index;
}

ComplexVector basis_state(std::string_view label) {
  const auto dim = static_cast<Eigen::Index>(ipow(2, static_cast<int>(label.size())));
  ComplexVector v = ComplexVector::Zero(dim);
  v(static_cast<Eigen::Index>(basis_index(label))) = 1.0;
  return v;
}

ComplexVector superposition(std::span<const std::string> labels) {
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "empty superposition");
  ComplexVector v = basis_state(labels[0]) * 0.0;
  for (const auto& l : labels) {
    if (l.size() != labels[0].size()) {
      throw Error(ErrorCode::kInvalidArgument, "mixed label widths in superposition");
    }
    v(static_cast<Eigen::Index>(basis_index(l))) += 1.0;
  }
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// PauliVector

PauliVector::PauliVector(int qubit_count, RealVector coefficients)
    : qubit_count_(qubit_count), coefficients_(std::move(coefficients)) {
  if (qubit_count < 1 || qubit_count > kMaxQubits ||
      static_cast<std::size_t>(coefficients_.size()) != pauli_dimension(qubit_count)) {
    throw Error(ErrorCode::kDimensionMismatch, "Pauli vector size");
  }
}

PauliVector PauliVector::from_density(const ComplexMatrix& rho) {
  const int n = width_of_dimension(static_cast<std::size_t>(rho.rows()), 2);
  const std::size_t dim = pauli_dimension(n);
  RealVector c(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    c(static_cast<Eigen::Index>(i)) =
        detail::trace_pauli_product(detail::pauli_monomial(n, i), rho).real();
  }
  return PauliVector(n, std::move(c));
}

PauliVector PauliVector::from_state(const ComplexVector& state) {
  return from_density(state * state.adjoint());
}

PauliVector PauliVector::maximally_mixed(int qubit_count) {
  RealVector c = RealVector::Zero(static_cast<Eigen::Index>(pauli_dimension(qubit_count)));
  c(0) = 1.0;
  return PauliVector(qubit_count, std::move(c));
}

ComplexMatrix PauliVector::density() const {
  const auto dim = static_cast<Eigen::Index>(ipow(2, qubit_count_));
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < coefficients_.size(); ++i) {
    if (coefficients_(i) == 0.0) continue;
    rho += coefficients_(i) *
           PauliString::from_index(qubit_count_, static_cast<std::size_t>(i)).matrix();
  }
  return rho / static_cast<double>(dim);
}

double PauliVector::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(density(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// NoiseModel

NoiseModel NoiseModel::identity() { return uniform(PauliChannel::identity(2)); }

NoiseModel NoiseModel::uniform(const PauliChannel& two_qubit_channel) {
  if (two_qubit_channel.qubit_count() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "entangler noise must be a two-qubit channel");
  }
  NoiseModel nm;
  nm.per_gate.emplace("*", two_qubit_channel);
  return nm;
}

const PauliChannel& NoiseModel::channel_for(const EntanglingGate& gate) const {
  const PauliChannel* ch = lookup(per_gate, gate);
  if (ch == nullptr) {
    throw Error(ErrorCode::kMissingNoiseEntry, "no noise entry for gate '" + gate.gate_id + "'");
  }
  return *ch;
}

double NoiseModel::overrotation_for(const EntanglingGate& gate) const {
  const double* eps = lookup(overrotation, gate);
  return eps == nullptr ? 0.0 : *eps;
}

void NoiseModel::validate_readout(int qubit_count) const {
  if (readout.empty()) return;
  if (static_cast<int>(readout.size()) != qubit_count) {
    throw Error(ErrorCode::kDimensionMismatch, "need one confusion matrix per qubit");
  }
  for (const auto& m : readout) {
    for (int a = 0; a < 2; ++a) {
      if (std::abs(m(0, a) + m(1, a) - 1.0) > 1e-9 || m(0, a) < 0.0 || m(1, a) < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "confusion columns must be distributions");
      }
    }
    if (std::abs(m.determinant()) < 1e-12) {
      throw Error(ErrorCode::kSingularConfusion, "confusion matrix is not invertible");
    }
    if (m(0, 0) < 0.5 || m(1, 1) < 0.5) {
      throw Error(ErrorCode::kInvalidArgument, "confusion diagonal below 0.5");
    }
  }
}

RealVector ShotCounts::frequencies() const {
  RealVector f(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f(static_cast<Eigen::Index>(i)) =
        shots > 0 ? static_cast<double>(counts[i]) / static_cast<double>(shots) : 0.0;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Evolution

ComplexVector evolve_exact(const PauliHamiltonian& h, double t, const ComplexVector& initial) {
  const ComplexMatrix hm = exact_matrix(h);
  if (hm.rows() != initial.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and Hamiltonian widths differ");
  }
  check_normalized(initial);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hm);
  const ComplexMatrix& v = solver.eigenvectors();
  ComplexVector coeffs = v.adjoint() * initial;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs(k) *= std::exp(std::complex<double>(0.0, -solver.eigenvalues()(k) * t));
  }
  return v * coeffs;
}

ComplexVector evolve_circuit(const Circuit& c, const ComplexVector& initial) {
  if (static_cast<std::size_t>(initial.size()) != ipow(2, c.qubit_count)) {
    throw Error(ErrorCode::kDimensionMismatch, "state width differs from circuit width");
  }
  ComplexVector state = initial;
  for (const auto& gate : c.gates) {
    apply_local(state, 2, c.qubit_count, gate_qubits(gate), gate_unitary(gate));
  }
  return state;
}

RealVector probabilities(const ComplexVector& state) { return state.cwiseAbs2(); }

RealVector run_ideal(const Circuit& c, const ComplexVector& initial) {
  return probabilities(evolve_circuit(c, initial));
}

PtmProgram lower_to_ptm(const Circuit& c, const NoiseModel* noise) {
  PtmProgram program;
  program.qubit_count = c.qubit_count;
  int entangler = 0;
  for (const auto& gate : c.gates) {
    if (const auto* r = std::get_if<SingleQubitRotation>(&gate)) {
      RealMatrix local = local_ptm(gate_unitary(gate));
      if (noise != nullptr && noise->single_qubit) {
        local = channel_matrix(*noise->single_qubit) * local;
      }
      program.ops.push_back({{r->qubit}, std::move(local), -1});
      continue;
    }
    const auto& e = std::get<EntanglingGate>(gate);
    std::vector<int> pair{e.first, e.second};
    program.entangler_qubits.push_back(pair);
    if (noise == nullptr) {
      program.ops.push_back({pair, local_ptm(gate_unitary(gate)), entangler});
    } else {
      const RealMatrix ideal = local_ptm(gate_unitary(Gate{with_overrotation(e, *noise)}));
      program.ops.push_back({pair, channel_matrix(noise->channel_for(e)) * ideal, entangler});
      if (noise->crosstalk) {
        const RealMatrix spectator = channel_matrix(*noise->crosstalk);
        for (int q = 0; q < c.qubit_count; ++q) {
          if (q != e.first && q != e.second) program.ops.push_back({{q}, spectator, -1});
        }
      }
    }
    ++entangler;
  }
  return program;
}

PauliVector run_program(const PtmProgram& program, PauliVector state,
                        std::span<const RealMatrix> after_entangler) {
  if (state.qubit_count() != program.qubit_count) {
    throw Error(ErrorCode::kDimensionMismatch, "state width differs from circuit width");
  }
  if (!after_entangler.empty() && after_entangler.size() != program.entangler_qubits.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one post-gate operation per entangler expected");
  }
  const int n = program.qubit_count;
  RealVector& v = state.coefficients();
  for (std::size_t k = 0; k < program.ops.size(); ++k) {
    const PtmOp& op = program.ops[k];
    apply_local(v, 4, n, op.qubits, op.local);
    if (op.entangler >= 0 && !after_entangler.empty()) {
      const auto g = static_cast<std::size_t>(op.entangler);
      apply_local(v, 4, n, program.entangler_qubits[g], after_entangler[g]);
    }
  }
  return state;
}

PauliVector run_noisy_ptm(const Circuit& c, const NoiseModel& nm, const PauliVector& initial) {
  return run_program(lower_to_ptm(c, &nm), initial);
}

ComplexMatrix run_noisy_density(const Circuit& c, const NoiseModel& nm, const ComplexMatrix& rho0) {
  const int n = c.qubit_count;
  if (static_cast<std::size_t>(rho0.rows()) != ipow(2, n) || rho0.rows() != rho0.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "density width differs from circuit width");
  }
  ComplexMatrix rho = rho0;
  for (const auto& gate : c.gates) {
    if (const auto* r = std::get_if<SingleQubitRotation>(&gate)) {
      const int q[1] = {r->qubit};
      conjugate_local(rho, n, q, gate_unitary(gate));
      if (nm.single_qubit) apply_pauli_channel_density(rho, n, q, *nm.single_qubit);
      continue;
    }
    const auto& e = std::get<EntanglingGate>(gate);
    const int pair[2] = {e.first, e.second};
    conjugate_local(rho, n, pair, gate_unitary(Gate{with_overrotation(e, nm)}));
    apply_pauli_channel_density(rho, n, pair, nm.channel_for(e));
    if (nm.crosstalk) {
      for (int q = 0; q < n; ++q) {
        if (q == e.first || q == e.second) continue;
        const int spectator[1] = {q};
        apply_pauli_channel_density(rho, n, spectator, *nm.crosstalk);
      }
    }
  }
  return rho;
}

RealVector populations_from_pauli_vector(const PauliVector& v) {
  const int n = v.qubit_count();
  const std::size_t dim = ipow(2, n);
  RealVector p = RealVector::Zero(static_cast<Eigen::Index>(dim));
  // Only strings made of I and Z contribute to the diagonal.
  for (std::size_t zmask = 0; zmask < dim; ++zmask) {
    std::size_t index = 0;
    for (int q = 0; q < n; ++q) {
      index = index * 4 + (((zmask >> (n - 1 - q)) & 1U) ? 3 : 0);
    }
    const double c = v[index];
    if (c == 0.0) continue;
    for (std::size_t x = 0; x < dim; ++x) {
      const bool odd = (std::popcount(x & zmask) & 1) != 0;
      p(static_cast<Eigen::Index>(x)) += odd ? -c : c;
    }
  }
  return p / static_cast<double>(dim);
}

ShotCounts sample_shots(std::span<const double> populations, std::int64_t shots,
                        std::uint64_t seed) {
  const int n = width_of_dimension(populations.size(), 2);
  if (shots < 0) throw Error(ErrorCode::kInvalidArgument, "negative shot count");
  ShotCounts out;
  out.qubit_count = n;
  out.shots = shots;
  out.counts.assign(populations.size(), 0);
  std::vector<double> cdf(populations.size());
  double running = 0.0;
  for (std::size_t i = 0; i < populations.size(); ++i) {
    double p = populations[i];
    if (!std::isfinite(p)) throw Error(ErrorCode::kInvalidArgument, "non-finite population");
    if (p < 0.0) {
      out.clipped = true;
      p = 0.0;
    }
    running += p;
    cdf[i] = running;
  }
  if (running <= 0.0) throw Error(ErrorCode::kInvalidArgument, "populations carry no mass");
  Rng rng(seed);
  for (std::int64_t s = 0; s < shots; ++s) ++out.counts[rng.categorical(cdf)];
  return out;
}

RealVector apply_readout_error(std::span<const double> populations, const NoiseModel& nm,
                               ReadoutDirection direction) {
  const int n = width_of_dimension(populations.size(), 2);
  RealVector p = Eigen::Map<const RealVector>(populations.data(),
                                              static_cast<Eigen::Index>(populations.size()));
  nm.validate_readout(n);
  if (nm.readout.empty()) return p;
  for (int q = 0; q < n; ++q) {
    const Confusion& m = nm.readout[static_cast<std::size_t>(q)];
    const int qubit[1] = {q};
    if (direction == ReadoutDirection::kCorrupt) {
      apply_local(p, 2, n, qubit, m);
    } else {
      apply_local(p, 2, n, qubit, m.inverse().eval());
    }
  }
  return p;
}

ShotCounts corrupt_counts(const ShotCounts& counts, const NoiseModel& nm, std::uint64_t seed) {
  nm.validate_readout(counts.qubit_count);
  if (nm.readout.empty()) return counts;
  const int n = counts.qubit_count;
  ShotCounts out = counts;
  std::fill(out.counts.begin(), out.counts.end(), 0);
  Rng rng(seed);
  for (std::size_t x = 0; x < counts.counts.size(); ++x) {
    for (std::int64_t s = 0; s < counts.counts[x]; ++s) {
      std::size_t read = 0;
      for (int q = 0; q < n; ++q) {
        const int bit = static_cast<int>((x >> (n - 1 - q)) & 1U);
        const double p_one = nm.readout[static_cast<std::size_t>(q)](1, bit);
        read = read * 2 + (rng.uniform() < p_one ? 1 : 0);
      }
      ++out.counts[read];
    }
  }
  return out;
}

RealVector correct_counts(const ShotCounts& counts, const NoiseModel& nm) {
  const RealVector f = counts.frequencies();
  return apply_readout_error(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())),
                             nm, ReadoutDirection::kCorrect);
}

}  // namespace pecsim
