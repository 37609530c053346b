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
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pecsim/linalg.hpp"

namespace pecsim {

inline constexpr int kMaxQubits = 4;

// Tolerances shared by every module.
inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kInverseTol = 1e-8;
inline constexpr double kMaxConditionNumber = 1e8;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);

/// Number of n-qubit Pauli strings, 4^n.
constexpr std::size_t pauli_dimension(int qubit_count) { return ipow(4, qubit_count); }

/// Single-qubit factor of the Pauli string with canonical `index` at `qubit`.
/// Qubit 0 is the most significant base-4 digit.
constexpr Pauli pauli_digit(std::size_t index, int qubit, int qubit_count) {
  return static_cast<Pauli>((index / ipow(4, qubit_count - 1 - qubit)) % 4);
}

/// +1 if the Pauli strings with indices a and b commute, -1 otherwise.
int commutation_sign(int qubit_count, std::size_t a, std::size_t b);

/// A labelled n-qubit Pauli operator (no phase). The canonical index is the
/// base-4 number with I=0, X=1, Y=2, Z=3 and the leftmost qubit most
/// significant, so two-qubit strings run II, IX, IY, IZ, XI, ..., ZZ.
class PauliString {
 public:
  explicit PauliString(std::vector<Pauli> labels);

  static PauliString parse(std::string_view text);
  static PauliString from_index(int qubit_count, std::size_t index);
  static PauliString identity(int qubit_count);

  int qubit_count() const { return static_cast<int>(labels_.size()); }
  std::size_t index() const;
  Pauli at(int qubit) const { return labels_.at(static_cast<std::size_t>(qubit)); }
  const std::vector<Pauli>& labels() const { return labels_; }
  std::string str() const;

  bool commutes_with(const PauliString& other) const;
  /// True if every factor is I or Z.
  bool is_diagonal() const;
  ComplexMatrix matrix() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> labels_;
};

/// Real 4^n x 4^n Pauli transfer matrix, entry (i,j) = tr(P_i L(P_j)) / 2^n.
class Ptm {
 public:
  Ptm(int qubit_count, RealMatrix entries);

  static Ptm identity(int qubit_count);
  static Ptm diagonal(int qubit_count, const RealVector& eigenvalues);

  int qubit_count() const { return qubit_count_; }
  std::size_t dimension() const { return static_cast<std::size_t>(entries_.rows()); }
  const RealMatrix& matrix() const { return entries_; }
  double operator()(std::size_t row, std::size_t col) const {
    return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  bool is_diagonal(double tol = kAlgebraTol) const;
  /// Largest absolute off-diagonal entry.
  double off_diagonal_norm() const;
  bool is_trace_preserving(double tol = kAlgebraTol) const;
  bool is_orthogonal(double tol = kAlgebraTol) const;

 private:
  int qubit_count_;
  RealMatrix entries_;
};

/// Probabilistic mixture of Pauli errors, weights indexed canonically.
class PauliChannel {
 public:
  PauliChannel(int qubit_count, std::vector<double> weights);

  static PauliChannel identity(int qubit_count);
  /// Uniform depolarizing: weight 1 - p(4^n-1)/4^n on identity, p/4^n on
  /// every other string, so every non-identity eigenvalue equals 1 - p.
  static PauliChannel depolarizing(int qubit_count, double p);
  /// Builds weights from labelled terms, e.g. {{"II", 0.9}, {"XX", 0.1}}.
  static PauliChannel from_terms(int qubit_count, const std::map<std::string, double>& terms);

  int qubit_count() const { return qubit_count_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Pauli eigenvalues lambda_b = sum_a weights_a w(a, b).
  RealVector eigenvalues() const;

 private:
  int qubit_count_;
  std::vector<double> weights_;
};

/// PTM of the unitary channel rho -> U rho U^dagger.
Ptm ptm_from_unitary(const ComplexMatrix& unitary);

/// Applies `first`, then `second`: returns second * first.
Ptm ptm_compose(const Ptm& first, const Ptm& second);

Ptm ptm_inverse(const Ptm& r);

/// Embeds a two-qubit PTM onto qubits (m, n) of a `total`-qubit register.
/// The first local qubit of `r` maps to m.
Ptm embed_two_qubit(const Ptm& r, int m, int n, int total);

/// General embedding of a k-qubit PTM onto `qubits` of a `total`-qubit register.
Ptm embed_ptm(const Ptm& r, std::span<const int> qubits, int total);

double process_fidelity(const Ptm& noisy, const Ptm& ideal);
double average_gate_fidelity(const Ptm& noisy, const Ptm& ideal);

Ptm pauli_channel_ptm(const PauliChannel& channel);

/// PTM of conjugation by the Pauli string with canonical index `a`: diagonal
/// with entries w(a, b).
Ptm pauli_operator_ptm(int qubit_count, std::size_t a);

namespace detail {

/// Action of a Pauli string on computational basis states:
/// P|x> = phase(x) |x XOR flip_mask>.
struct PauliMonomial {
  std::size_t flip_mask = 0;
  std::vector<std::complex<double>> phases;  // indexed by x
};

PauliMonomial pauli_monomial(int qubit_count, std::size_t index);

/// tr(P M) for the Pauli string in monomial form.
std::complex<double> trace_pauli_product(const PauliMonomial& p, const ComplexMatrix& m);

/// P M (left multiplication) for the Pauli string in monomial form.
ComplexMatrix left_multiply(const PauliMonomial& p, const ComplexMatrix& m);

}  // namespace detail

}  // namespace pecsim
