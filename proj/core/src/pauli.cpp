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

#include "pecsim/pauli.hpp"

#include <cmath>
#include <numeric>

#include "pecsim/errors.hpp"

namespace pecsim {
namespace {

void check_qubit_count(int qubit_count) {
  if (qubit_count < 1 || qubit_count > kMaxQubits) {
    throw Error(ErrorCode::kUnsupportedSize,
                "qubit count " + std::to_string(qubit_count) + " outside 1.." +
                    std::to_string(kMaxQubits));
  }
}

Pauli parse_pauli(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default:
      throw Error(ErrorCode::kInvalidArgument, std::string("bad Pauli symbol '") + c + "'");
  }
}

}  // namespace

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

int commutation_sign(int qubit_count, std::size_t a, std::size_t b) {
  int anticommuting = 0;
  for (int q = 0; q < qubit_count; ++q) {
    const Pauli pa = pauli_digit(a, q, qubit_count);
    const Pauli pb = pauli_digit(b, q, qubit_count);
    if (pa != Pauli::I && pb != Pauli::I && pa != pb) ++anticommuting;
  }
  return anticommuting % 2 == 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// PauliString

PauliString::PauliString(std::vector<Pauli> labels) : labels_(std::move(labels)) {
  check_qubit_count(static_cast<int>(labels_.size()));
}

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> labels;
  labels.reserve(text.size());
  for (char c : text) labels.push_back(parse_pauli(c));
  return PauliString(std::move(labels));
}

PauliString PauliString::from_index(int qubit_count, std::size_t index) {
  check_qubit_count(qubit_count);
  if (index >= pauli_dimension(qubit_count)) {
    throw Error(ErrorCode::kIndexOutOfRange, "Pauli index " + std::to_string(index));
  }
  std::vector<Pauli> labels(static_cast<std::size_t>(qubit_count));
  for (int q = 0; q < qubit_count; ++q) {
    labels[static_cast<std::size_t>(q)] = pauli_digit(index, q, qubit_count);
  }
  return PauliString(std::move(labels));
}

PauliString PauliString::identity(int qubit_count) {
  check_qubit_count(qubit_count);
  return PauliString(std::vector<Pauli>(static_cast<std::size_t>(qubit_count), Pauli::I));
}

std::size_t PauliString::index() const {
  std::size_t index = 0;
  for (Pauli p : labels_) index = index * 4 + static_cast<std::size_t>(p);
  return index;
}

std::string PauliString::str() const {
  std::string s;
  for (Pauli p : labels_) s.push_back(pauli_char(p));
  return s;
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.qubit_count() != qubit_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "Pauli strings of different width");
  }
  return commutation_sign(qubit_count(), index(), other.index()) == 1;
}

bool PauliString::is_diagonal() const {
  for (Pauli p : labels_) {
    if (p == Pauli::X || p == Pauli::Y) return false;
  }
  return true;
}

ComplexMatrix PauliString::matrix() const {
  const auto mono = detail::pauli_monomial(qubit_count(), index());
  const auto dim = static_cast<Eigen::Index>(mono.phases.size());
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    m(static_cast<Eigen::Index>(static_cast<std::size_t>(x) ^ mono.flip_mask), x) =
        mono.phases[static_cast<std::size_t>(x)];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Ptm

Ptm::Ptm(int qubit_count, RealMatrix entries)
    : qubit_count_(qubit_count), entries_(std::move(entries)) {
  check_qubit_count(qubit_count);
  const auto dim = static_cast<Eigen::Index>(pauli_dimension(qubit_count));
  if (entries_.rows() != dim || entries_.cols() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "PTM for " + std::to_string(qubit_count) + " qubits must be " +
                    std::to_string(dim) + "x" + std::to_string(dim));
  }
}

Ptm Ptm::identity(int qubit_count) {
  check_qubit_count(qubit_count);
  const auto dim = static_cast<Eigen::Index>(pauli_dimension(qubit_count));
  return Ptm(qubit_count, RealMatrix::Identity(dim, dim));
}

Ptm Ptm::diagonal(int qubit_count, const RealVector& eigenvalues) {
  check_qubit_count(qubit_count);
  if (static_cast<std::size_t>(eigenvalues.size()) != pauli_dimension(qubit_count)) {
    throw Error(ErrorCode::kDimensionMismatch, "diagonal PTM eigenvalue count");
  }
  return Ptm(qubit_count, eigenvalues.asDiagonal());
}

double Ptm::off_diagonal_norm() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      if (i != j) worst = std::max(worst, std::abs(entries_(i, j)));
    }
  }
  return worst;
}

bool Ptm::is_diagonal(double tol) const { return off_diagonal_norm() <= tol; }

bool Ptm::is_trace_preserving(double tol) const {
  if (std::abs(entries_(0, 0) - 1.0) > tol) return false;
  for (Eigen::Index j = 1; j < entries_.cols(); ++j) {
    if (std::abs(entries_(0, j)) > tol) return false;
  }
  return true;
}

bool Ptm::is_orthogonal(double tol) const {
  const RealMatrix gram = entries_.transpose() * entries_;
  return (gram - RealMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// PauliChannel

PauliChannel::PauliChannel(int qubit_count, std::vector<double> weights)
    : qubit_count_(qubit_count), weights_(std::move(weights)) {
  check_qubit_count(qubit_count);
  if (weights_.size() != pauli_dimension(qubit_count)) {
    throw Error(ErrorCode::kInvalidWeights, "expected " +
                                                std::to_string(pauli_dimension(qubit_count)) +
                                                " weights, got " + std::to_string(weights_.size()));
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < -1e-12 || w > 1.0 + 1e-12) {
      throw Error(ErrorCode::kInvalidWeights, "weight outside [0, 1]");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidWeights, "weights sum to " + std::to_string(total));
  }
}

PauliChannel PauliChannel::identity(int qubit_count) {
  check_qubit_count(qubit_count);
  std::vector<double> w(pauli_dimension(qubit_count), 0.0);
  w[0] = 1.0;
  return PauliChannel(qubit_count, std::move(w));
}

PauliChannel PauliChannel::depolarizing(int qubit_count, double p) {
  check_qubit_count(qubit_count);
  const double dim = static_cast<double>(pauli_dimension(qubit_count));
  std::vector<double> w(pauli_dimension(qubit_count), p / dim);
  w[0] = 1.0 - p * (dim - 1.0) / dim;
  return PauliChannel(qubit_count, std::move(w));
}

PauliChannel PauliChannel::from_terms(int qubit_count, const std::map<std::string, double>& terms) {
  check_qubit_count(qubit_count);
  std::vector<double> w(pauli_dimension(qubit_count), 0.0);
  for (const auto& [label, weight] : terms) {
    const PauliString p = PauliString::parse(label);
    if (p.qubit_count() != qubit_count) {
      throw Error(ErrorCode::kInvalidWeights, "term '" + label + "' has wrong width");
    }
    w[p.index()] += weight;
  }
  return PauliChannel(qubit_count, std::move(w));
}

RealVector PauliChannel::eigenvalues() const {
  const std::size_t dim = weights_.size();
  RealVector lambda = RealVector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    double sum = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      if (weights_[a] != 0.0) sum += weights_[a] * commutation_sign(qubit_count_, a, b);
    }
    lambda(static_cast<Eigen::Index>(b)) = sum;
  }
  return lambda;
}

// ---------------------------------------------------------------------------
// Free functions

namespace detail {

PauliMonomial pauli_monomial(int qubit_count, std::size_t index) {
  const std::size_t dim = ipow(2, qubit_count);
  PauliMonomial mono;
  mono.phases.assign(dim, {1.0, 0.0});
  for (int q = 0; q < qubit_count; ++q) {
    const std::size_t bit = std::size_t{1} << (qubit_count - 1 - q);
    const Pauli p = pauli_digit(index, q, qubit_count);
    if (p == Pauli::X || p == Pauli::Y) mono.flip_mask |= bit;
    for (std::size_t x = 0; x < dim; ++x) {
      const bool one = (x & bit) != 0;
      if (p == Pauli::Y) {
        mono.phases[x] *= one ? std::complex<double>(0.0, -1.0) : std::complex<double>(0.0, 1.0);
      } else if (p == Pauli::Z && one) {
        mono.phases[x] = -mono.phases[x];
      }
    }
  }
  return mono;
}

std::complex<double> trace_pauli_product(const PauliMonomial& p, const ComplexMatrix& m) {
  std::complex<double> sum = 0.0;
  const std::size_t dim = p.phases.size();
  for (std::size_t y = 0; y < dim; ++y) {
    const std::size_t z = y ^ p.flip_mask;
    sum += p.phases[z] * m(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(y));
  }
  return sum;
}

ComplexMatrix left_multiply(const PauliMonomial& p, const ComplexMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  const std::size_t dim = p.phases.size();
  for (std::size_t x = 0; x < dim; ++x) {
    out.row(static_cast<Eigen::Index>(x ^ p.flip_mask)) =
        p.phases[x] * m.row(static_cast<Eigen::Index>(x));
  }
  return out;
}

}  // namespace detail

Ptm ptm_from_unitary(const ComplexMatrix& unitary) {
  if (unitary.rows() != unitary.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "unitary must be square");
  }
  const auto dim = static_cast<std::size_t>(unitary.rows());
  int qubit_count = 0;
  while (ipow(2, qubit_count) < dim) ++qubit_count;
  if (ipow(2, qubit_count) != dim || qubit_count < 1 || qubit_count > kMaxQubits) {
    throw Error(ErrorCode::kDimensionMismatch,
                "unitary dimension " + std::to_string(dim) + " is not 2^n with n in 1..4");
  }
  const ComplexMatrix gram = unitary.adjoint() * unitary;
  const double deviation =
      (gram - ComplexMatrix::Identity(unitary.rows(), unitary.cols())).cwiseAbs().maxCoeff();
  if (deviation > kAlgebraTol) {
    throw Error(ErrorCode::kNonUnitary, "U^dagger U deviates from identity by " +
                                            std::to_string(deviation));
  }

  const std::size_t pdim = pauli_dimension(qubit_count);
  std::vector<detail::PauliMonomial> paulis;
  paulis.reserve(pdim);
  for (std::size_t i = 0; i < pdim; ++i) paulis.push_back(detail::pauli_monomial(qubit_count, i));

  const ComplexMatrix u_dag = unitary.adjoint();
  RealMatrix r(static_cast<Eigen::Index>(pdim), static_cast<Eigen::Index>(pdim));
  for (std::size_t j = 0; j < pdim; ++j) {
    const ComplexMatrix conjugated = unitary * detail::left_multiply(paulis[j], u_dag);
    for (std::size_t i = 0; i < pdim; ++i) {
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          detail::trace_pauli_product(paulis[i], conjugated).real() / static_cast<double>(dim);
    }
  }
  return Ptm(qubit_count, std::move(r));
}

Ptm ptm_compose(const Ptm& first, const Ptm& second) {
  if (first.qubit_count() != second.qubit_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot compose PTMs of different width");
  }
  return Ptm(first.qubit_count(), second.matrix() * first.matrix());
}

Ptm ptm_inverse(const Ptm& r) {
  if (r.is_orthogonal(1e-12)) return Ptm(r.qubit_count(), r.matrix().transpose());
  Eigen::JacobiSVD<RealMatrix> svd(r.matrix());
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  const double condition = smallest > 0.0 ? sv(0) / smallest : INFINITY;
  if (!(condition < kMaxConditionNumber)) {
    throw Error(ErrorCode::kSingular, "PTM condition number " + std::to_string(condition));
  }
  return Ptm(r.qubit_count(), r.matrix().fullPivLu().inverse());
}

Ptm embed_ptm(const Ptm& r, std::span<const int> qubits, int total) {
  const auto k = static_cast<int>(qubits.size());
  if (k != r.qubit_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding width does not match PTM");
  }
  if (total < k || total > kMaxQubits) {
    throw Error(ErrorCode::kIndexOutOfRange, "total qubit count " + std::to_string(total));
  }
  std::size_t used = 0;
  for (int q : qubits) {
    if (q < 0 || q >= total || ((used >> q) & 1U) != 0) {
      throw Error(ErrorCode::kIndexOutOfRange, "bad embedding qubit " + std::to_string(q));
    }
    used |= std::size_t{1} << q;
  }
  const std::size_t dim = pauli_dimension(total);
  const std::vector<std::size_t> offsets = local_offsets(4, total, qubits);
  RealMatrix out = RealMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t anchor = 0; anchor < dim; ++anchor) {
    bool is_anchor = true;
    for (int q : qubits) {
      if (pauli_digit(anchor, q, total) != Pauli::I) {
        is_anchor = false;
        break;
      }
    }
    if (!is_anchor) continue;
    for (std::size_t li = 0; li < offsets.size(); ++li) {
      for (std::size_t lj = 0; lj < offsets.size(); ++lj) {
        out(static_cast<Eigen::Index>(anchor + offsets[li]),
            static_cast<Eigen::Index>(anchor + offsets[lj])) = r(li, lj);
      }
    }
  }
  return Ptm(total, std::move(out));
}

Ptm embed_two_qubit(const Ptm& r, int m, int n, int total) {
  if (r.qubit_count() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "embed_two_qubit needs a two-qubit PTM");
  }
  if (m == n) throw Error(ErrorCode::kIndexOutOfRange, "pair qubits must differ");
  const int qubits[2] = {m, n};
  return embed_ptm(r, qubits, total);
}

double process_fidelity(const Ptm& noisy, const Ptm& ideal) {
  if (noisy.qubit_count() != ideal.qubit_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "fidelity of PTMs of different width");
  }
  const double d = static_cast<double>(ipow(2, noisy.qubit_count()));
  return (ideal.matrix().transpose() * noisy.matrix()).trace() / (d * d);
}

double average_gate_fidelity(const Ptm& noisy, const Ptm& ideal) {
  const double d = static_cast<double>(ipow(2, noisy.qubit_count()));
  return (d * process_fidelity(noisy, ideal) + 1.0) / (d + 1.0);
}

Ptm pauli_channel_ptm(const PauliChannel& channel) {
  return Ptm::diagonal(channel.qubit_count(), channel.eigenvalues());
}

Ptm pauli_operator_ptm(int qubit_count, std::size_t a) {
  check_qubit_count(qubit_count);
  const std::size_t dim = pauli_dimension(qubit_count);
  if (a >= dim) throw Error(ErrorCode::kIndexOutOfRange, "Pauli index " + std::to_string(a));
  RealVector diag(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    diag(static_cast<Eigen::Index>(b)) = commutation_sign(qubit_count, a, b);
  }
  return Ptm::diagonal(qubit_count, diag);
}

}  // namespace pecsim
