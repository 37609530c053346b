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

#include "pecsim/hubbard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <tuple>

#include "pecsim/errors.hpp"

namespace pecsim {
namespace {

constexpr double kDropCoefficient = 1e-15;

ComplexMatrix single_pauli(Pauli p) {
  return PauliString(std::vector<Pauli>{p}).matrix();
}

Pauli axis_pauli(Axis axis) {
  switch (axis) {
    case Axis::kX: return Pauli::X;
    case Axis::kY: return Pauli::Y;
    case Axis::kZ: return Pauli::Z;
  }
  return Pauli::Z;
}

Pauli entangler_pauli(EntanglerKind kind) {
  switch (kind) {
    case EntanglerKind::kXX: return Pauli::X;
    case EntanglerKind::kYY: return Pauli::Y;
    case EntanglerKind::kZZ: return Pauli::Z;
  }
  return Pauli::Y;
}

std::vector<int> support(const PauliString& p) {
  std::vector<int> qubits;
  for (int q = 0; q < p.qubit_count(); ++q) {
    if (p.at(q) != Pauli::I) qubits.push_back(q);
  }
  return qubits;
}

// Accumulates Pauli terms by (part, string) so duplicates merge.
class TermAccumulator {
 public:
  explicit TermAccumulator(int qubit_count) : qubit_count_(qubit_count) {}

  void add(TermPart part, double coefficient, std::vector<std::pair<int, Pauli>> factors) {
    std::vector<Pauli> labels(static_cast<std::size_t>(qubit_count_), Pauli::I);
    for (auto [q, p] : factors) labels[static_cast<std::size_t>(q)] = p;
    const PauliString s(std::move(labels));
    auto [it, inserted] = terms_.try_emplace(key(part, s), PauliTerm{0.0, s, part});
    it->second.coefficient += coefficient;
  }

  std::vector<PauliTerm> finish() const {
    std::vector<PauliTerm> out;
    for (const auto& [k, term] : terms_) {
      if (std::abs(term.coefficient) > kDropCoefficient) out.push_back(term);
    }
    return out;
  }

 private:
  // Two-qubit terms sorted by ascending qubit pair, then single-qubit terms
  // by ascending qubit, within each part.
  using Key = std::tuple<int, int, int, int, std::size_t>;
  Key key(TermPart part, const PauliString& s) const {
    const std::vector<int> q = support(s);
    const int weight_rank = q.size() >= 2 ? 0 : 1;
    const int q0 = q.empty() ? -1 : q[0];
    const int q1 = q.size() >= 2 ? q[1] : -1;
    return {static_cast<int>(part), weight_rank, q0, q1, s.index()};
  }

  int qubit_count_;
  std::map<Key, PauliTerm> terms_;
};

}  // namespace

char axis_char(Axis axis) { return pauli_char(axis_pauli(axis)); }

std::string entangler_name(EntanglerKind kind) {
  const char c = pauli_char(entangler_pauli(kind));
  return std::string{c, c};
}

HubbardSpec HubbardSpec::validated() const {
  if (sites < 1) throw Error(ErrorCode::kInvalidArgument, "site count must be positive");
  if (qubit_count() > kMaxQubits) {
    throw Error(ErrorCode::kUnsupportedSize,
                "model needs " + std::to_string(qubit_count()) + " qubits; at most " +
                    std::to_string(kMaxQubits) + " supported");
  }
  if (!std::isfinite(tunneling) || !std::isfinite(onsite) || !std::isfinite(neighbor)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite model parameter");
  }
  HubbardSpec out = *this;
  if (components == Components::kOne) out.onsite = 0.0;
  return out;
}

std::vector<PauliTerm> PauliHamiltonian::part(TermPart which) const {
  std::vector<PauliTerm> out;
  for (const auto& t : terms) {
    if (t.part == which) out.push_back(t);
  }
  return out;
}

std::size_t Circuit::entangling_count() const {
  return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [](const Gate& g) {
    return std::holds_alternative<EntanglingGate>(g);
  }));
}

std::vector<const EntanglingGate*> Circuit::entangling_gates() const {
  std::vector<const EntanglingGate*> out;
  for (const auto& g : gates) {
    if (const auto* e = std::get_if<EntanglingGate>(&g)) out.push_back(e);
  }
  return out;
}

std::string pair_key(EntanglerKind kind, int first, int second) {
  return entangler_name(kind) + "(" + std::to_string(first) + "," + std::to_string(second) + ")";
}

std::string native_gate_id(int first, int second, double angle) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "@%.6f", angle);
  return pair_key(EntanglerKind::kYY, first, second) + buf;
}

ComplexMatrix gate_unitary(const Gate& gate) {
  using namespace std::complex_literals;
  if (const auto* r = std::get_if<SingleQubitRotation>(&gate)) {
    const ComplexMatrix sigma = single_pauli(axis_pauli(r->axis));
    return std::cos(r->angle / 2.0) * ComplexMatrix::Identity(2, 2) -
           1i * std::sin(r->angle / 2.0) * sigma;
  }
  const auto& e = std::get<EntanglingGate>(gate);
  const Pauli p = entangler_pauli(e.kind);
  const ComplexMatrix sigma = PauliString(std::vector<Pauli>{p, p}).matrix();
  return std::cos(e.angle) * ComplexMatrix::Identity(4, 4) - 1i * std::sin(e.angle) * sigma;
}

std::vector<int> gate_qubits(const Gate& gate) {
  if (const auto* r = std::get_if<SingleQubitRotation>(&gate)) return {r->qubit};
  const auto& e = std::get<EntanglingGate>(gate);
  return {e.first, e.second};
}

PauliHamiltonian build_hamiltonian(const HubbardSpec& raw_spec) {
  const HubbardSpec spec = raw_spec.validated();
  const int n = spec.qubit_count();
  const int chains = spec.components == Components::kOne ? 1 : 2;
  const double j = spec.tunneling;
  const double v = spec.neighbor;
  const double u = spec.onsite;

  TermAccumulator acc(n);
  double offset = 0.0;
  // (c/4)(1 - Z_a)(1 - Z_b) = c/4 (I - Z_a - Z_b + Z_a Z_b)
  auto add_density_product = [&](double c, int a, int b) {
    if (c == 0.0) return;
    offset += c / 4.0;
    acc.add(TermPart::kZ, -c / 4.0, {{a, Pauli::Z}});
    acc.add(TermPart::kZ, -c / 4.0, {{b, Pauli::Z}});
    acc.add(TermPart::kZ, c / 4.0, {{a, Pauli::Z}, {b, Pauli::Z}});
  };

  for (int chain = 0; chain < chains; ++chain) {
    const int base = chain * spec.sites;
    for (int l = 0; l + 1 < spec.sites; ++l) {
      const int a = base + l;
      const int b = base + l + 1;
      acc.add(TermPart::kX, j / 2.0, {{a, Pauli::X}, {b, Pauli::X}});
      acc.add(TermPart::kY, j / 2.0, {{a, Pauli::Y}, {b, Pauli::Y}});
      add_density_product(v, a, b);
    }
  }
  if (spec.components == Components::kTwo) {
    for (int l = 0; l < spec.sites; ++l) add_density_product(u, l, spec.sites + l);
  }

  PauliHamiltonian h;
  h.qubit_count = n;
  h.offset = offset;
  h.terms = acc.finish();
  return h;
}

ComplexMatrix exact_matrix(const PauliHamiltonian& h) {
  if (h.qubit_count < 1 || h.qubit_count > kMaxQubits) {
    throw Error(ErrorCode::kSizeGuard, "Hamiltonian width " + std::to_string(h.qubit_count));
  }
  const auto dim = static_cast<Eigen::Index>(ipow(2, h.qubit_count));
  ComplexMatrix m = h.offset * ComplexMatrix::Identity(dim, dim);
  for (const auto& t : h.terms) m += t.coefficient * t.pauli.matrix();
  return m;
}

Circuit trotter_circuit(const PauliHamiltonian& h, double total_time, int steps) {
  if (steps < 1) throw Error(ErrorCode::kInvalidSteps, "Trotter step count must be >= 1");
  const double dt = total_time / steps;

  std::vector<Gate> block;
  for (TermPart part : {TermPart::kX, TermPart::kY, TermPart::kZ}) {
    for (const auto& term : h.part(part)) {
      const std::vector<int> qubits = support(term.pauli);
      if (qubits.size() == 1) {
        const Pauli p = term.pauli.at(qubits[0]);
        const Axis axis = p == Pauli::X ? Axis::kX : p == Pauli::Y ? Axis::kY : Axis::kZ;
        block.emplace_back(SingleQubitRotation{axis, 2.0 * term.coefficient * dt, qubits[0]});
      } else if (qubits.size() == 2) {
        const Pauli p = term.pauli.at(qubits[0]);
        if (term.pauli.at(qubits[1]) != p) {
          throw Error(ErrorCode::kUnknownGateKind,
                      "no entangler for mixed term " + term.pauli.str());
        }
        const EntanglerKind kind = p == Pauli::X   ? EntanglerKind::kXX
                                   : p == Pauli::Y ? EntanglerKind::kYY
                                                   : EntanglerKind::kZZ;
        block.emplace_back(EntanglingGate{kind, term.coefficient * dt, qubits[0], qubits[1],
                                          pair_key(kind, qubits[0], qubits[1])});
      } else if (!qubits.empty()) {
        throw Error(ErrorCode::kUnknownGateKind,
                    "term " + term.pauli.str() + " acts on more than two qubits");
      }
    }
  }

  Circuit c;
  c.qubit_count = h.qubit_count;
  c.gates.reserve(block.size() * static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) c.gates.insert(c.gates.end(), block.begin(), block.end());
  return c;
}

Circuit compile_to_native(const Circuit& circuit) {
  constexpr double kQuarter = std::numbers::pi / 2.0;  // sqrt(Z) = Rz(pi/2)
  Circuit out;
  out.qubit_count = circuit.qubit_count;
  for (const auto& gate : circuit.gates) {
    if (std::holds_alternative<SingleQubitRotation>(gate)) {
      out.gates.push_back(gate);
      continue;
    }
    const auto& e = std::get<EntanglingGate>(gate);
    if (e.first == e.second || e.first < 0 || e.second < 0 || e.first >= circuit.qubit_count ||
        e.second >= circuit.qubit_count) {
      throw Error(ErrorCode::kIndexOutOfRange, "entangling gate pair out of range");
    }
    const EntanglingGate native{EntanglerKind::kYY, e.angle, e.first, e.second,
                                native_gate_id(e.first, e.second, e.angle)};
    switch (e.kind) {
      case EntanglerKind::kYY:
        out.gates.emplace_back(native);
        break;
      case EntanglerKind::kXX:
        // XX = (sqrtZ x sqrtZ)^dagger YY (sqrtZ x sqrtZ)
        out.gates.emplace_back(SingleQubitRotation{Axis::kZ, kQuarter, e.first});
        out.gates.emplace_back(SingleQubitRotation{Axis::kZ, kQuarter, e.second});
        out.gates.emplace_back(native);
        out.gates.emplace_back(SingleQubitRotation{Axis::kZ, -kQuarter, e.first});
        out.gates.emplace_back(SingleQubitRotation{Axis::kZ, -kQuarter, e.second});
        break;
      case EntanglerKind::kZZ:
        // ZZ = (sqrtX x sqrtX) YY (sqrtX x sqrtX)^dagger
        out.gates.emplace_back(SingleQubitRotation{Axis::kX, -kQuarter, e.first});
        out.gates.emplace_back(SingleQubitRotation{Axis::kX, -kQuarter, e.second});
        out.gates.emplace_back(native);
        out.gates.emplace_back(SingleQubitRotation{Axis::kX, kQuarter, e.first});
        out.gates.emplace_back(SingleQubitRotation{Axis::kX, kQuarter, e.second});
        break;
      default:
        throw Error(ErrorCode::kUnknownGateKind, "unknown entangler kind");
    }
  }
  return out;
}

Circuit merge_rotations(const Circuit& circuit) {
  Circuit out;
  out.qubit_count = circuit.qubit_count;
  // Index into out.gates of the last rotation on each qubit that may still absorb.
  std::vector<std::ptrdiff_t> open(static_cast<std::size_t>(circuit.qubit_count), -1);
  for (const auto& gate : circuit.gates) {
    if (const auto* r = std::get_if<SingleQubitRotation>(&gate)) {
      const auto q = static_cast<std::size_t>(r->qubit);
      if (open[q] >= 0) {
        auto& prev = std::get<SingleQubitRotation>(out.gates[static_cast<std::size_t>(open[q])]);
        if (prev.axis == r->axis) {
          prev.angle += r->angle;
          continue;
        }
      }
      open[q] = static_cast<std::ptrdiff_t>(out.gates.size());
      out.gates.push_back(gate);
    } else {
      const auto& e = std::get<EntanglingGate>(gate);
      open[static_cast<std::size_t>(e.first)] = -1;
      open[static_cast<std::size_t>(e.second)] = -1;
      out.gates.push_back(gate);
    }
  }
  std::erase_if(out.gates, [](const Gate& g) {
    const auto* r = std::get_if<SingleQubitRotation>(&g);
    return r != nullptr && std::remainder(r->angle, 4.0 * std::numbers::pi) == 0.0;
  });
  return out;
}

ComplexMatrix circuit_unitary(const Circuit& circuit) {
  const int n = circuit.qubit_count;
  if (n < 1 || n > kMaxQubits) throw Error(ErrorCode::kSizeGuard, "circuit width");
  const auto dim = static_cast<Eigen::Index>(ipow(2, n));
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& gate : circuit.gates) {
    const ComplexMatrix local = gate_unitary(gate);
    const std::vector<int> qubits = gate_qubits(gate);
    for (Eigen::Index col = 0; col < dim; ++col) {
      ComplexVector column = u.col(col);
      apply_local(column, 2, n, qubits, local);
      u.col(col) = column;
    }
  }
  return u;
}

}  // namespace pecsim
