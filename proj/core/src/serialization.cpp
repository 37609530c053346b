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

#include "pecsim/serialization.hpp"

#include <algorithm>

#include "json_io.hpp"

namespace pecsim {
namespace detail {
namespace {

Pauli parse_pauli_char(char c, const std::string& path) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: field_error(path, std::string("bad Pauli letter '") + c + "'");
  }
}

EntanglerKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "XX") return EntanglerKind::kXX;
  if (s == "YY") return EntanglerKind::kYY;
  if (s == "ZZ") return EntanglerKind::kZZ;
  field_error(path, "unknown entangler kind '" + s + "'");
}

Axis parse_axis(const std::string& s, const std::string& path) {
  if (s == "X") return Axis::kX;
  if (s == "Y") return Axis::kY;
  if (s == "Z") return Axis::kZ;
  field_error(path, "unknown rotation axis '" + s + "'");
}

ProductEigenstate parse_eigenstate(const std::string& label, const std::string& path) {
  ProductEigenstate s;
  std::size_t pos = 0;
  while (pos < label.size()) {
    if (pos + 1 >= label.size() || (label[pos] != '+' && label[pos] != '-')) {
      field_error(path, "bad eigenstate label '" + label + "'");
    }
    s.signs.push_back(label[pos] == '+' ? 1 : -1);
    s.axes.push_back(parse_pauli_char(label[pos + 1], path));
    pos += 2;
    if (pos < label.size() && label[pos] == ',') ++pos;
  }
  return s;
}

template <typename T>
std::vector<T> list_of(const Json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array");
  try {
    return j.get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    field_error(path, "wrong element type");
  }
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::kConfigError, "JSON syntax error at line " + std::to_string(line) +
                                             ", column " + std::to_string(column));
  }
}

Json to_json_value(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RealVector vector_from_json(const Json& j, const std::string& path) {
  const auto values = list_of<double>(j, path);
  RealVector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

Json to_json_value(const Ptm& r) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < r.dimension(); ++i) {
    for (std::size_t k = 0; k < r.dimension(); ++k) entries.push_back(r(i, k));
  }
  return Json{{"qubit_count", r.qubit_count()}, {"entries", std::move(entries)}};
}

Ptm ptm_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  const int n = in.get<int>("qubit_count");
  if (n < 1 || n > kMaxQubits) field_error(join_path(path, "qubit_count"), "out of range");
  const auto entries = list_of<double>(in.at("entries"), join_path(path, "entries"));
  const auto dim = static_cast<Eigen::Index>(pauli_dimension(n));
  if (entries.size() != static_cast<std::size_t>(dim * dim)) {
    field_error(join_path(path, "entries"), "expected " + std::to_string(dim * dim) + " values");
  }
  RealMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) m(i, k) = entries[static_cast<std::size_t>(i * dim + k)];
  }
  return Ptm(n, std::move(m));
}

Json to_json_value(const PauliChannel& ch) {
  Json weights = Json::object();
  for (std::size_t a = 0; a < ch.weights().size(); ++a) {
    weights[PauliString::from_index(ch.qubit_count(), a).str()] = ch.weights()[a];
  }
  return Json{{"qubit_count", ch.qubit_count()}, {"weights", std::move(weights)}};
}

PauliChannel channel_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  const int n = in.get<int>("qubit_count");
  std::map<std::string, double> terms;
  try {
    terms = in.at("weights").get<std::map<std::string, double>>();
  } catch (const nlohmann::json::exception&) {
    field_error(join_path(path, "weights"), "expected label -> weight");
  }
  return PauliChannel::from_terms(n, terms);
}

Json to_json_value(const EntanglingGate& g) {
  return Json{{"type", "ent"},
              {"kind", entangler_name(g.kind)},
              {"angle", g.angle},
              {"qubits", {g.first, g.second}},
              {"gate_id", g.gate_id}};
}

EntanglingGate entangler_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  EntanglingGate g;
  g.kind = parse_kind(in.get<std::string>("kind"), join_path(path, "kind"));
  g.angle = in.get<double>("angle");
  const auto q = list_of<int>(in.at("qubits"), join_path(path, "qubits"));
  if (q.size() != 2) field_error(join_path(path, "qubits"), "expected two qubits");
  g.first = q[0];
  g.second = q[1];
  g.gate_id = in.get_or<std::string>("gate_id", pair_key(g.kind, g.first, g.second));
  return g;
}

Json to_json_value(const Circuit& c) {
  Json gates = Json::array();
  for (const auto& g : c.gates) {
    if (const auto* r = std::get_if<SingleQubitRotation>(&g)) {
      gates.push_back(Json{{"type", "rot"},
                           {"axis", std::string(1, axis_char(r->axis))},
                           {"angle", r->angle},
                           {"qubit", r->qubit}});
    } else {
      gates.push_back(to_json_value(std::get<EntanglingGate>(g)));
    }
  }
  return Json{{"qubit_count", c.qubit_count}, {"gates", std::move(gates)}};
}

Circuit circuit_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  Circuit c;
  c.qubit_count = in.get<int>("qubit_count");
  const Json& gates = in.at("gates");
  if (!gates.is_array()) field_error(join_path(path, "gates"), "expected an array");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const std::string gp = join_path(path, "gates[" + std::to_string(i) + "]");
    const JsonReader g(gates[i], gp);
    const auto type = g.get<std::string>("type");
    if (type == "rot") {
      c.gates.emplace_back(SingleQubitRotation{
          parse_axis(g.get<std::string>("axis"), join_path(gp, "axis")), g.get<double>("angle"),
          g.get<int>("qubit")});
    } else if (type == "ent") {
      c.gates.emplace_back(entangler_from_json(gates[i], gp));
    } else {
      field_error(join_path(gp, "type"), "expected 'rot' or 'ent'");
    }
  }
  return c;
}

Json to_json_value(const ShotCounts& c) {
  Json counts = Json::object();
  for (std::size_t x = 0; x < c.counts.size(); ++x) {
    if (c.counts[x] != 0) counts[basis_label(x, c.qubit_count)] = c.counts[x];
  }
  return Json{{"qubit_count", c.qubit_count},
              {"shots", c.shots},
              {"clipped", c.clipped},
              {"counts", std::move(counts)}};
}

ShotCounts counts_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  ShotCounts c;
  c.qubit_count = in.get<int>("qubit_count");
  c.shots = in.get<std::int64_t>("shots");
  c.clipped = in.get_or<bool>("clipped", false);
  if (c.qubit_count < 0 || c.qubit_count > kMaxQubits) {
    field_error(join_path(path, "qubit_count"), "out of range");
  }
  c.counts.assign(ipow(2, c.qubit_count), 0);
  const JsonReader counts = in.object("counts");
  std::int64_t total = 0;
  for (const auto& item : counts.node().items()) {
    const std::string lp = join_path(counts.path(), item.key());
    if (item.key().size() != static_cast<std::size_t>(c.qubit_count)) field_error(lp, "bad label");
    std::size_t x = 0;
    try {
      x = basis_index(item.key());
    } catch (const Error&) {
      field_error(lp, "bad label");
    }
    const auto n = counts.get<std::int64_t>(item.key());
    if (n < 0) field_error(lp, "negative count");
    c.counts[x] = n;
    total += n;
  }
  if (total != c.shots) field_error(join_path(path, "counts"), "counts do not sum to shots");
  return c;
}

Json to_json_value(const GateCharacterization& ch) {
  Json settings = Json::array();
  for (const auto& s : ch.settings) {
    settings.push_back(Json{{"observable", PauliString::from_index(2, s.observable).str()},
                            {"input", s.input.label()},
                            {"ideal", s.ideal_expectation},
                            {"measured", s.measured_expectation}});
  }
  Json eigenvalues = Json::object();
  for (Eigen::Index b = 0; b < ch.eigenvalues.size(); ++b) {
    eigenvalues[PauliString::from_index(2, static_cast<std::size_t>(b)).str()] = ch.eigenvalues(b);
  }
  return Json{{"gate_id", ch.gate_id},
              {"gate", to_json_value(ch.gate)},
              {"shots_per_setting", ch.shots_per_setting},
              {"eigenvalues", std::move(eigenvalues)},
              {"settings", std::move(settings)},
              {"ideal", to_json_value(ch.ideal)},
              {"estimated_noisy", to_json_value(ch.estimated_noisy)}};
}

GateCharacterization characterization_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  GateCharacterization ch;
  ch.gate_id = in.get<std::string>("gate_id");
  ch.gate = entangler_from_json(in.at("gate"), join_path(path, "gate"));
  ch.shots_per_setting = in.get<std::int64_t>("shots_per_setting");
  ch.ideal = ptm_from_json(in.at("ideal"), join_path(path, "ideal"));
  ch.estimated_noisy = ptm_from_json(in.at("estimated_noisy"), join_path(path, "estimated_noisy"));
  const JsonReader ev = in.object("eigenvalues");
  ch.eigenvalues = RealVector::Ones(static_cast<Eigen::Index>(pauli_dimension(2)));
  for (const auto& item : ev.node().items()) {
    std::size_t b = 0;
    try {
      b = PauliString::parse(item.key()).index();
    } catch (const Error&) {
      field_error(join_path(ev.path(), item.key()), "bad Pauli label");
    }
    if (item.key().size() != 2) field_error(join_path(ev.path(), item.key()), "bad Pauli label");
    ch.eigenvalues(static_cast<Eigen::Index>(b)) = ev.get<double>(item.key());
  }
  const Json& settings = in.at("settings");
  if (!settings.is_array()) field_error(join_path(path, "settings"), "expected an array");
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const std::string sp = join_path(path, "settings[" + std::to_string(i) + "]");
    const JsonReader s(settings[i], sp);
    QptSetting q;
    q.observable = PauliString::parse(s.get<std::string>("observable")).index();
    q.input = parse_eigenstate(s.get<std::string>("input"), join_path(sp, "input"));
    q.ideal_expectation = s.get<double>("ideal");
    q.measured_expectation = s.get<double>("measured");
    ch.settings.push_back(std::move(q));
  }
  return ch;
}

Json to_json_value(const QuasiProbDecomposition& d) {
  Json terms = Json::array();
  for (std::size_t a = 0; a < d.q.size(); ++a) {
    terms.push_back(Json{{"pauli", PauliString::from_index(d.qubit_count, a).str()},
                         {"q", d.q[a]},
                         {"p", d.p[a]},
                         {"sign", d.signs[a]}});
  }
  return Json{{"gate_id", d.gate_id},
              {"qubit_count", d.qubit_count},
              {"cost", d.cost},
              {"clipped", d.clipped},
              {"terms", std::move(terms)}};
}

QuasiProbDecomposition decomposition_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  QuasiProbDecomposition d;
  d.gate_id = in.get<std::string>("gate_id");
  d.qubit_count = in.get<int>("qubit_count");
  d.cost = in.get<double>("cost");
  d.clipped = in.get_or<bool>("clipped", false);
  const Json& terms = in.at("terms");
  const std::size_t dim = pauli_dimension(d.qubit_count);
  if (!terms.is_array() || terms.size() != dim) {
    field_error(join_path(path, "terms"), "expected " + std::to_string(dim) + " terms");
  }
  d.q.resize(dim);
  d.p.resize(dim);
  d.signs.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string tp = join_path(path, "terms[" + std::to_string(i) + "]");
    const JsonReader t(terms[i], tp);
    const std::size_t a = PauliString::parse(t.get<std::string>("pauli")).index();
    if (a >= dim) field_error(join_path(tp, "pauli"), "out of range");
    d.q[a] = t.get<double>("q");
    d.p[a] = t.get<double>("p");
    d.signs[a] = t.get<int>("sign");
  }
  return d;
}

Json to_json_value(const PecEstimate& e) {
  return Json{{"observable", e.observable},         {"value", e.value},
              {"standard_error", e.standard_error}, {"samples", e.samples},
              {"shots", e.shots},                   {"cost", e.cost}};
}

PecEstimate estimate_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  PecEstimate e;
  e.observable = in.get<std::string>("observable");
  e.value = in.get<double>("value");
  e.standard_error = in.get<double>("standard_error");
  e.samples = in.get<std::size_t>("samples");
  e.shots = in.get<std::int64_t>("shots");
  e.cost = in.get<double>("cost");
  return e;
}

Json to_json_value(const PecSample& s) {
  Json out{{"sample_index", s.sample_index},
           {"sign", s.sign},
           {"insertions", s.insertions},
           {"populations", to_json_value(s.populations)},
           {"values", s.values}};
  if (s.counts.shots > 0) out["counts"] = to_json_value(s.counts);
  return out;
}

PecSample sample_from_json(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  PecSample s;
  s.sample_index = in.get<std::size_t>("sample_index");
  s.sign = in.get<int>("sign");
  if (s.sign != 1 && s.sign != -1) field_error(join_path(path, "sign"), "expected +1 or -1");
  s.insertions = list_of<std::size_t>(in.at("insertions"), join_path(path, "insertions"));
  s.populations = vector_from_json(in.at("populations"), join_path(path, "populations"));
  s.values = list_of<double>(in.at("values"), join_path(path, "values"));
  if (in.has("counts")) s.counts = counts_from_json(in.at("counts"), join_path(path, "counts"));
  return s;
}

}  // namespace detail

#define PECSIM_JSON_TYPE(Type, reader)                            \
  template <>                                                     \
  std::string to_json<Type>(const Type& value) {                  \
    return detail::to_json_value(value).dump(2);                  \
  }                                                               \
  template <>                                                     \
  Type from_json<Type>(std::string_view text) {                   \
    return detail::reader(detail::parse_json(text), "");          \
  }

PECSIM_JSON_TYPE(Ptm, ptm_from_json)
PECSIM_JSON_TYPE(PauliChannel, channel_from_json)
PECSIM_JSON_TYPE(Circuit, circuit_from_json)
PECSIM_JSON_TYPE(ShotCounts, counts_from_json)
PECSIM_JSON_TYPE(GateCharacterization, characterization_from_json)
PECSIM_JSON_TYPE(QuasiProbDecomposition, decomposition_from_json)
PECSIM_JSON_TYPE(PecEstimate, estimate_from_json)
PECSIM_JSON_TYPE(PecSample, sample_from_json)

#undef PECSIM_JSON_TYPE

}  // namespace pecsim
