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

#include "pecsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json_io.hpp"
#include "parallel.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/rng.hpp"

namespace pecsim {
namespace {

using detail::field_error;
using detail::join_path;
using detail::Json;
using detail::JsonReader;

std::span<const double> view(const RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

double channel_avg_fidelity(const PauliChannel& ch) {
  return average_gate_fidelity(pauli_channel_ptm(ch), Ptm::identity(ch.qubit_count()));
}

PauliChannel single_error(int qubit_count, const std::string& label, double p) {
  const PauliString s = PauliString::parse(label);
  if (s.qubit_count() != qubit_count || s.index() == 0) {
    config_error("pauli_error label '" + label + "' must be a non-identity " +
                 std::to_string(qubit_count) + "-qubit string");
  }
  std::vector<double> w(pauli_dimension(qubit_count), 0.0);
  w[0] = 1.0 - p;
  w[s.index()] = p;
  return PauliChannel(qubit_count, std::move(w));
}

// ---------------------------------------------------------------------------
// Config JSON.

Json channel_json(const ChannelSpec& c) {
  Json j{{"type", c.type}};
  if (c.p) j["p"] = *c.p;
  if (c.avg_gate_fidelity) j["avg_gate_fidelity"] = *c.avg_gate_fidelity;
  if (c.cost) j["cost"] = *c.cost;
  if (!c.label.empty()) j["label"] = c.label;
  if (!c.terms.empty()) j["terms"] = c.terms;
  return j;
}

ChannelSpec channel_spec_from(const Json& j, const std::string& path) {
  const JsonReader in(j, path);
  in.only({"type", "p", "avg_gate_fidelity", "cost", "label", "terms"});
  ChannelSpec c;
  c.type = in.get<std::string>("type");
  if (in.has("p")) c.p = in.get<double>("p");
  if (in.has("avg_gate_fidelity")) c.avg_gate_fidelity = in.get<double>("avg_gate_fidelity");
  if (in.has("cost")) c.cost = in.get<double>("cost");
  c.label = in.get_or<std::string>("label", "");
  if (in.has("terms")) c.terms = in.get<std::map<std::string, double>>("terms");
  if (c.type != "identity" && c.type != "depolarizing" && c.type != "pauli" &&
      c.type != "pauli_error") {
    field_error(join_path(path, "type"), "unknown channel type '" + c.type + "'");
  }
  return c;
}

Json complex_json(std::complex<double> z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

std::complex<double> complex_from(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  field_error(path, "expected a number or [re, im]");
}

Json confusion_json(const Confusion& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

Confusion confusion_from(const Json& j, const std::string& path) {
  Confusion m;
  if (!j.is_array() || j.size() != 2) field_error(path, "expected a 2x2 matrix");
  for (int r = 0; r < 2; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      field_error(path, "expected a 2x2 matrix");
    }
    m(r, 0) = row[0].get<double>();
    m(r, 1) = row[1].get<double>();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Presets.

ExperimentConfig base_preset(std::string name, HubbardSpec model, int steps, double phi,
                             std::vector<std::string> initial, std::size_t samples) {
  ExperimentConfig cfg;
  cfg.name = std::move(name);
  cfg.model = model;
  cfg.steps = steps;
  cfg.phi = phi;
  const double amp = 1.0 / std::sqrt(static_cast<double>(initial.size()));
  for (auto& label : initial) cfg.initial_state.emplace_back(std::move(label), amp);
  cfg.samples = samples;
  cfg.shots = 300;
  return cfg;
}

ChannelSpec depolarizing_cost(double cost) {
  ChannelSpec c;
  c.type = "depolarizing";
  c.cost = cost;
  return c;
}

ExperimentConfig two_spinless() {
  ExperimentConfig cfg = base_preset("two_spinless", {2, Components::kOne, 1.0, 0.0, 2.0}, 8,
                                     std::numbers::pi / 4.0, {"11", "10"}, 1000);
  cfg.noise.default_channel.type = "depolarizing";
  cfg.noise.default_channel.avg_gate_fidelity = 0.9811;
  return cfg;
}

ExperimentConfig three_spinless(double v, std::string name) {
  ExperimentConfig cfg = base_preset(std::move(name), {3, Components::kOne, 1.0, 0.0, v}, 4,
                                     std::numbers::pi / 8.0, {"101", "110"}, 1500);
  cfg.noise.gates["YY(0,1)"] = depolarizing_cost(1.157);
  cfg.noise.gates["YY(1,2)"] = depolarizing_cost(1.171);
  return cfg;
}

ExperimentConfig two_site_spinful(double u, std::string name) {
  ExperimentConfig cfg = base_preset(std::move(name), {2, Components::kTwo, 1.0, u, 0.0}, 4,
                                     std::numbers::pi / 8.0, {"1001", "1010"}, 2000);
  cfg.noise.gates["YY(0,1)"] = depolarizing_cost(1.211);
  cfg.noise.gates["YY(2,3)"] = depolarizing_cost(1.228);
  cfg.noise.gates["YY(0,2)"] = depolarizing_cost(1.228);
  cfg.noise.gates["YY(1,3)"] = depolarizing_cost(1.223);
  return cfg;
}

// ---------------------------------------------------------------------------
// Mitigation helpers.

struct StageValues {
  Stage stage;
  RealVector values;
};

void append(std::vector<double>& out, const RealVector& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

// Output layout of a bootstrap pipeline: per stage, populations then
// (normalized fidelity, unnormalized fidelity), then spin/charge per site.
struct OutputLayout {
  std::size_t dim = 0;
  int sites = 0;  // 0 when spin/charge is not tracked

  std::size_t per_stage() const { return dim + 2 + 2 * static_cast<std::size_t>(sites); }
  std::size_t offset(std::size_t stage_slot) const { return stage_slot * per_stage(); }
};

void append_stage(std::vector<double>& out, const RealVector& values, const RealVector& ideal,
                  const std::optional<SpinLayout>& layout, int sites) {
  append(out, values);
  out.push_back(population_fidelity(view(values), view(ideal), FidelityMode::kNormalized));
  out.push_back(population_fidelity(view(values), view(ideal), FidelityMode::kRaw));
  if (layout) {
    for (int s = 0; s < sites; ++s) {
      const SpinCharge sc = spin_charge(view(values), *layout, s);
      out.push_back(sc.spin);
      out.push_back(sc.charge);
    }
  }
}

struct MitigationChain {
  RealVector pec;
  RealVector mle;
  RealVector ps;
  double leakage = 0.0;
};

MitigationChain run_chain(const RealVector& pec, const ExperimentConfig& cfg,
                          const SymmetrySector& sector) {
  MitigationChain c;
  c.pec = pec;
  c.mle = mle_project(view(pec));
  if (cfg.ps) {
    try {
      PostSelection sel = post_select(view(c.mle), sector);
      c.ps = std::move(sel.values);
      c.leakage = sel.leakage;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptySector) throw;
      // Nothing survives: fall back to the uniform state on the sector.
      c.ps = RealVector::Zero(c.mle.size());
      for (std::size_t x : sector.allowed)
        c.ps(static_cast<Eigen::Index>(x)) = 1.0 / static_cast<double>(sector.allowed.size());
      c.leakage = 1.0;
    }
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

PauliChannel ChannelSpec::resolve(int qubit_count) const {
  const int given = (p ? 1 : 0) + (avg_gate_fidelity ? 1 : 0) + (cost ? 1 : 0);
  if (type == "identity") {
    if (given != 0) config_error("identity channel takes no parameters");
    return PauliChannel::identity(qubit_count);
  }
  if (type == "pauli") {
    if (given != 0) config_error("pauli channel takes only 'terms'");
    return PauliChannel::from_terms(qubit_count, terms);
  }
  if (given != 1) {
    config_error(type + " channel needs exactly one of p, avg_gate_fidelity, cost");
  }
  const double d = static_cast<double>(pauli_dimension(qubit_count));
  if (type == "depolarizing") {
    if (p) return PauliChannel::depolarizing(qubit_count, *p);
    // p at which the non-identity eigenvalues 1 - p reach zero.
    const double p_max = d / (d - 1.0);
    if (avg_gate_fidelity) {
      const double x = bisect_parameter(
          [&](double q) { return channel_avg_fidelity(PauliChannel::depolarizing(qubit_count, q)); },
          *avg_gate_fidelity, 0.0, p_max);
      return PauliChannel::depolarizing(qubit_count, x);
    }
    const double x = bisect_parameter(
        [&](double q) {
          return decompose_inverse(pauli_channel_ptm(PauliChannel::depolarizing(qubit_count, q)))
              .cost;
        },
        *cost, 0.0, 0.5);
    return PauliChannel::depolarizing(qubit_count, x);
  }
  if (type == "pauli_error") {
    if (p) return single_error(qubit_count, label, *p);
    if (avg_gate_fidelity) {
      const double x = bisect_parameter(
          [&](double q) { return channel_avg_fidelity(single_error(qubit_count, label, q)); },
          *avg_gate_fidelity, 0.0, 1.0);
      return single_error(qubit_count, label, x);
    }
    const double x = bisect_parameter(
        [&](double q) {
          return decompose_inverse(pauli_channel_ptm(single_error(qubit_count, label, q))).cost;
        },
        *cost, 0.0, 0.49);
    return single_error(qubit_count, label, x);
  }
  config_error("unknown channel type '" + type + "'");
}

NoiseModel NoiseSpec::build() const {
  NoiseModel nm;
  nm.per_gate.insert_or_assign("*", default_channel.resolve(2));
  for (const auto& [key, spec] : gates) nm.per_gate.insert_or_assign(key, spec.resolve(2));
  nm.overrotation = overrotation;
  if (crosstalk) nm.crosstalk = crosstalk->resolve(1);
  if (single_qubit) nm.single_qubit = single_qubit->resolve(1);
  nm.readout = readout;
  return nm;
}

double bisect_parameter(const std::function<double(double)>& metric, double target, double lo,
                        double hi) {
  if (!std::isfinite(target)) config_error("calibration target must be finite");
  double f_lo = metric(lo) - target;
  const double f_hi = metric(hi) - target;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    config_error("calibration target " + std::to_string(target) + " is outside the range [" +
                 std::to_string(std::min(f_lo, f_hi) + target) + ", " +
                 std::to_string(std::max(f_lo, f_hi) + target) + "]");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = metric(mid) - target;
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PauliChannel calibrate_channel(const std::string& family, double target_avg_fidelity,
                               const std::string& label) {
  ChannelSpec spec;
  spec.type = family;
  spec.avg_gate_fidelity = target_avg_fidelity;
  spec.label = label;
  return spec.resolve(2);
}

// ---------------------------------------------------------------------------

ComplexVector ExperimentConfig::initial_vector() const {
  const int n = model.qubit_count();
  if (initial_state.empty()) config_error("initial_state is empty");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(ipow(2, n)));
  for (const auto& [label, amp] : initial_state) {
    if (label.size() != static_cast<std::size_t>(n) ||
        label.find_first_not_of("01") != std::string::npos) {
      config_error("initial_state label '" + label + "' is not a " + std::to_string(n) +
                   "-qubit basis label");
    }
    v(static_cast<Eigen::Index>(basis_index(label))) += amp;
  }
  const double norm = v.norm();
  if (!(norm > 1e-12)) config_error("initial_state has zero norm");
  return v / norm;
}

SymmetrySector ExperimentConfig::symmetry_sector() const {
  if (!sector.empty()) return SymmetrySector::from_labels(sector);
  const ComplexVector v = initial_vector();
  std::vector<std::size_t> support;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) support.push_back(static_cast<std::size_t>(i));
  }
  return SymmetrySector::matching(model.qubit_count(), support,
                                  model.components == Components::kTwo);
}

SpinLayout ExperimentConfig::spin_layout() const {
  return layout ? *layout : SpinLayout::chain(model.sites);
}

void ExperimentConfig::validate() const {
  const HubbardSpec spec = model.validated();
  if (!std::isfinite(model.tunneling) || model.tunneling == 0.0) {
    config_error("model.tunneling must be finite and nonzero");
  }
  if (steps < 1) config_error("trotter.steps must be >= 1");
  if (!std::isfinite(phi)) config_error("trotter.phi must be finite");
  if (samples < 1) config_error("pec.samples must be >= 1");
  if (shots < 0 || raw_shots < 0) config_error("shot counts must be nonnegative");
  if (shots_per_setting < 0) config_error("characterization.shots_per_setting must be >= 0");
  if (bootstrap != 0 && bootstrap < kMinBootstrapReplicates) {
    config_error("post.bootstrap must be 0 (off) or >= " +
                 std::to_string(kMinBootstrapReplicates));
  }
  initial_vector();
  if (ps) {
    const SymmetrySector s = symmetry_sector();
    if (s.qubit_count != spec.qubit_count()) config_error("post.sector labels have the wrong width");
  }
  if (layout && spec.components != Components::kTwo) {
    config_error("layout applies to two-component models only");
  }
  noise.build().validate_readout(spec.qubit_count());
}

std::vector<std::string> preset_names() {
  return {"two_spinless", "three_spinless", "three_spinless_v0", "two_site_spinful",
          "two_site_spinful_u0"};
}

ExperimentConfig preset(std::string_view name) {
  if (name == "two_spinless") return two_spinless();
  if (name == "three_spinless") return three_spinless(2.0, "three_spinless");
  if (name == "three_spinless_v0") return three_spinless(0.0, "three_spinless_v0");
  if (name == "two_site_spinful") return two_site_spinful(2.0, "two_site_spinful");
  if (name == "two_site_spinful_u0") return two_site_spinful(0.0, "two_site_spinful_u0");
  config_error("unknown preset '" + std::string(name) + "'");
}

std::string config_to_json(const ExperimentConfig& cfg) {
  Json initial = Json::object();
  for (const auto& [label, amp] : cfg.initial_state) initial[label] = complex_json(amp);

  Json noise{{"default", channel_json(cfg.noise.default_channel)}};
  Json gates = Json::object();
  for (const auto& [k, v] : cfg.noise.gates) gates[k] = channel_json(v);
  noise["gates"] = std::move(gates);
  noise["overrotation"] = cfg.noise.overrotation;
  if (cfg.noise.crosstalk) noise["crosstalk"] = channel_json(*cfg.noise.crosstalk);
  if (cfg.noise.single_qubit) noise["single_qubit"] = channel_json(*cfg.noise.single_qubit);
  Json readout = Json::array();
  for (const auto& m : cfg.noise.readout) readout.push_back(confusion_json(m));
  noise["readout"] = std::move(readout);

  Json j{
      {"name", cfg.name},
      {"model",
       {{"sites", cfg.model.sites},
        {"components", static_cast<int>(cfg.model.components)},
        {"tunneling", cfg.model.tunneling},
        {"onsite", cfg.model.onsite},
        {"neighbor", cfg.model.neighbor}}},
      {"trotter", {{"steps", cfg.steps}, {"phi", cfg.phi}}},
      {"initial_state", std::move(initial)},
      {"noise", std::move(noise)},
      {"pec",
       {{"mode", cfg.pec_mode == PecMode::kOracle ? "oracle" : "sampled"},
        {"samples", cfg.samples},
        {"shots", cfg.shots},
        {"raw_shots", cfg.raw_shots},
        {"master_seed", cfg.master_seed}}},
      {"characterization",
       {{"shots_per_setting", cfg.shots_per_setting},
        {"seed", cfg.characterization_seed},
        {"exact", cfg.exact_characterization}}},
      {"post",
       {{"mle", cfg.mle},
        {"ps", cfg.ps},
        {"bootstrap", cfg.bootstrap},
        {"bootstrap_seed", cfg.bootstrap_seed},
        {"sector", cfg.sector}}},
  };
  if (cfg.layout) j["layout"] = {{"up", cfg.layout->up}, {"down", cfg.layout->down}};
  return j.dump(2);
}

ExperimentConfig config_from_json(std::string_view text) {
  const Json root = detail::parse_json(text);
  const JsonReader in(root, "");
  in.only({"name", "preset", "model", "trotter", "initial_state", "noise", "pec",
           "characterization", "post", "layout"});

  ExperimentConfig cfg;
  if (in.has("preset")) cfg = preset(in.get<std::string>("preset"));
  cfg.name = in.get_or<std::string>("name", cfg.name);

  if (in.has("model")) {
    const JsonReader m = in.object("model");
    m.only({"sites", "components", "tunneling", "onsite", "neighbor"});
    cfg.model.sites = m.get_or<int>("sites", cfg.model.sites);
    const int comps = m.get_or<int>("components", static_cast<int>(cfg.model.components));
    if (comps != 1 && comps != 2) field_error("model.components", "expected 1 or 2");
    cfg.model.components = comps == 1 ? Components::kOne : Components::kTwo;
    cfg.model.tunneling = m.get_or<double>("tunneling", cfg.model.tunneling);
    cfg.model.onsite = m.get_or<double>("onsite", cfg.model.onsite);
    cfg.model.neighbor = m.get_or<double>("neighbor", cfg.model.neighbor);
  }
  if (in.has("trotter")) {
    const JsonReader t = in.object("trotter");
    t.only({"steps", "phi"});
    cfg.steps = t.get_or<int>("steps", cfg.steps);
    cfg.phi = t.get_or<double>("phi", cfg.phi);
  }
  if (in.has("initial_state")) {
    const Json& s = in.at("initial_state");
    cfg.initial_state.clear();
    if (s.is_string()) {
      cfg.initial_state.emplace_back(s.get<std::string>(), 1.0);
    } else if (s.is_object()) {
      for (const auto& item : s.items()) {
        cfg.initial_state.emplace_back(
            item.key(), complex_from(item.value(), join_path("initial_state", item.key())));
      }
    } else {
      field_error("initial_state", "expected a basis label or label -> amplitude object");
    }
  }
  if (in.has("noise")) {
    const JsonReader n = in.object("noise");
    n.only({"default", "gates", "overrotation", "crosstalk", "single_qubit", "readout"});
    if (n.has("default")) cfg.noise.default_channel = channel_spec_from(n.at("default"), "noise.default");
    if (n.has("gates")) {
      const JsonReader g = n.object("gates");
      cfg.noise.gates.clear();
      for (const auto& item : g.node().items()) {
        cfg.noise.gates[item.key()] =
            channel_spec_from(item.value(), join_path(g.path(), item.key()));
      }
    }
    if (n.has("overrotation")) {
      cfg.noise.overrotation = n.get<std::map<std::string, double>>("overrotation");
    }
    if (n.has("crosstalk")) cfg.noise.crosstalk = channel_spec_from(n.at("crosstalk"), "noise.crosstalk");
    if (n.has("single_qubit")) {
      cfg.noise.single_qubit = channel_spec_from(n.at("single_qubit"), "noise.single_qubit");
    }
    if (n.has("readout")) {
      const Json& r = n.at("readout");
      if (!r.is_array()) field_error("noise.readout", "expected a list of 2x2 matrices");
      cfg.noise.readout.clear();
      for (std::size_t i = 0; i < r.size(); ++i) {
        cfg.noise.readout.push_back(
            confusion_from(r[i], "noise.readout[" + std::to_string(i) + "]"));
      }
    }
  }
  if (in.has("pec")) {
    const JsonReader p = in.object("pec");
    p.only({"mode", "samples", "shots", "raw_shots", "master_seed"});
    if (p.has("mode")) {
      const auto mode = p.get<std::string>("mode");
      if (mode == "sampled") {
        cfg.pec_mode = PecMode::kSampled;
      } else if (mode == "oracle") {
        cfg.pec_mode = PecMode::kOracle;
      } else {
        field_error("pec.mode", "expected 'sampled' or 'oracle'");
      }
    }
    cfg.samples = p.get_or<std::size_t>("samples", cfg.samples);
    cfg.shots = p.get_or<std::int64_t>("shots", cfg.shots);
    cfg.raw_shots = p.get_or<std::int64_t>("raw_shots", cfg.raw_shots);
    cfg.master_seed = p.get_or<std::uint64_t>("master_seed", cfg.master_seed);
  }
  if (in.has("characterization")) {
    const JsonReader c = in.object("characterization");
    c.only({"shots_per_setting", "seed", "exact"});
    cfg.shots_per_setting = c.get_or<std::int64_t>("shots_per_setting", cfg.shots_per_setting);
    cfg.characterization_seed = c.get_or<std::uint64_t>("seed", cfg.characterization_seed);
    cfg.exact_characterization = c.get_or<bool>("exact", cfg.exact_characterization);
  }
  if (in.has("post")) {
    const JsonReader p = in.object("post");
    p.only({"mle", "ps", "bootstrap", "bootstrap_seed", "sector"});
    cfg.mle = p.get_or<bool>("mle", cfg.mle);
    cfg.ps = p.get_or<bool>("ps", cfg.ps);
    cfg.bootstrap = p.get_or<int>("bootstrap", cfg.bootstrap);
    cfg.bootstrap_seed = p.get_or<std::uint64_t>("bootstrap_seed", cfg.bootstrap_seed);
    cfg.sector = p.get_or<std::vector<std::string>>("sector", cfg.sector);
  }
  if (in.has("layout")) {
    const JsonReader l = in.object("layout");
    l.only({"up", "down"});
    cfg.layout = SpinLayout{l.get<std::vector<int>>("up"), l.get<std::vector<int>>("down")};
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------

Stage ResultBundle::mitigated_stage() const {
  if (config.ps) return Stage::kPs;
  if (config.mle) return Stage::kMle;
  return Stage::kPec;
}

const PopulationRecord* ResultBundle::find(int step, Stage stage) const {
  for (const auto& r : populations) {
    if (r.step == step && r.stage == stage) return &r;
  }
  return nullptr;
}

const FidelityRecord* ResultBundle::find_fidelity(int step, Stage stage) const {
  for (const auto& r : fidelities) {
    if (r.step == step && r.stage == stage) return &r;
  }
  return nullptr;
}

Circuit experiment_circuit(const ExperimentConfig& cfg, int steps) {
  const PauliHamiltonian h = build_hamiltonian(cfg.model);
  if (steps == 0) {
    Circuit empty;
    empty.qubit_count = h.qubit_count;
    return empty;
  }
  return compile_to_native(trotter_circuit(h, steps * cfg.dt(), steps));
}

ResultBundle simulate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const NoiseModel nm = cfg.noise.build();
  const bool oracle = cfg.pec_mode == PecMode::kOracle;

  ResultBundle b;
  b.config = cfg;
  b.qubit_count = cfg.model.qubit_count();
  b.gates_per_step = static_cast<int>(experiment_circuit(cfg, 1).entangling_count());

  std::map<std::string, EntanglingGate> distinct;
  const Circuit full = experiment_circuit(cfg, cfg.steps);
  for (const EntanglingGate* g : full.entangling_gates()) {
    distinct.emplace(g->gate_id, *g);
  }
  std::vector<EntanglingGate> gates;
  for (const auto& [id, g] : distinct) gates.push_back(g);
  const std::int64_t qpt_shots = cfg.exact_characterization ? 0 : cfg.shots_per_setting;
  b.characterizations.resize(gates.size());
  detail::parallel_for(gates.size(), [&](std::size_t i) {
    b.characterizations[i] =
        characterize_gate(gates[i], nm, qpt_shots, derive_seed(cfg.characterization_seed, i));
  });
  for (const auto& ch : b.characterizations) {
    b.decompositions.emplace(ch.gate_id, decompose_characterization(ch));
  }

  const ComplexVector psi0 = cfg.initial_vector();
  const PauliVector initial = PauliVector::from_state(psi0);
  const std::vector<Observable> observables = Observable::all_projectors(b.qubit_count);

  for (int k = 0; k <= cfg.steps; ++k) {
    const Circuit c = experiment_circuit(cfg, k);
    StepData d;
    d.step = k;
    d.entangling_gates = c.entangling_count();
    d.cost = circuit_cost(b.decompositions, c);
    d.ideal = run_ideal(c, psi0);
    d.noisy = populations_from_pauli_vector(run_noisy_ptm(c, nm, initial));
    if (oracle) {
      d.pec_oracle = pec_exact_oracle(c, nm, b.decompositions, initial);
    } else {
      if (cfg.raw_shots > 0) {
        const RealVector read = apply_readout_error(view(d.noisy), nm, ReadoutDirection::kCorrupt);
        d.raw_counts = sample_shots(view(read), cfg.raw_shots,
                                    derive_seed(cfg.master_seed, static_cast<std::uint64_t>(k), 1));
      }
      d.pec = run_pec_samples(c, nm, b.decompositions, initial, observables, cfg.samples, cfg.shots,
                              derive_seed(cfg.master_seed, static_cast<std::uint64_t>(k)));
    }
    b.data.push_back(std::move(d));
  }
  return b;
}

void mitigate(ResultBundle& b) {
  if (b.data.empty()) throw Error(ErrorCode::kInsufficientData, "bundle holds no step data");
  const ExperimentConfig& cfg = b.config;
  const NoiseModel nm = cfg.noise.build();
  const SymmetrySector sector = cfg.symmetry_sector();
  const bool two_component = cfg.model.components == Components::kTwo;
  const std::optional<SpinLayout> layout =
      two_component ? std::optional<SpinLayout>(cfg.spin_layout()) : std::nullopt;
  const int sites = two_component ? cfg.model.sites : 0;
  const std::size_t dim = ipow(2, b.qubit_count);
  const OutputLayout out_layout{dim, sites};

  b.populations.clear();
  b.fidelities.clear();
  b.spin_charge.clear();
  b.fits.clear();
  b.leakage.clear();

  for (const StepData& d : b.data) {
    const bool sampled = d.pec.samples.size() > 0;
    const RealVector pec_values = sampled ? signed_populations(d.pec) : d.pec_oracle;
    if (pec_values.size() != static_cast<Eigen::Index>(dim)) {
      throw Error(ErrorCode::kInsufficientData,
                  "step " + std::to_string(d.step) + " holds no PEC data");
    }
    const RealVector raw_values =
        d.raw_counts.shots > 0 ? correct_counts(d.raw_counts, nm) : d.noisy;
    const MitigationChain chain = run_chain(pec_values, cfg, sector);
    b.leakage.push_back(chain.leakage);

    std::vector<StageValues> stages{{Stage::kIdeal, d.ideal},
                                    {Stage::kNoisy, d.noisy},
                                    {Stage::kRaw, raw_values},
                                    {Stage::kPec, chain.pec}};
    if (cfg.mle) stages.push_back({Stage::kMle, chain.mle});
    if (cfg.ps) stages.push_back({Stage::kPs, chain.ps});

    // Bootstrap outputs per stage slot: raw -> slot 0 of raw_boot; pec, mle,
    // ps -> slots 0, 1, 2 of chain_boot.
    std::optional<BootstrapResult> raw_boot;
    std::optional<BootstrapResult> chain_boot;
    if (cfg.bootstrap > 0) {
      const std::uint64_t step_seed = derive_seed(cfg.bootstrap_seed, static_cast<std::uint64_t>(d.step));
      if (d.raw_counts.shots > 0) {
        raw_boot = bootstrap_shots(
            d.raw_counts,
            [&](const ShotCounts& counts) {
              std::vector<double> out;
              append_stage(out, correct_counts(counts, nm), d.ideal, layout, sites);
              return out;
            },
            cfg.bootstrap, derive_seed(step_seed, 0));
      }
      if (sampled) {
        chain_boot = bootstrap_records(
            d.pec.samples.size(),
            [&](std::span<const std::size_t> idx) {
              const MitigationChain c = run_chain(signed_populations(d.pec, idx), cfg, sector);
              std::vector<double> out;
              append_stage(out, c.pec, d.ideal, layout, sites);
              append_stage(out, c.mle, d.ideal, layout, sites);
              append_stage(out, cfg.ps ? c.ps : c.mle, d.ideal, layout, sites);
              return out;
            },
            cfg.bootstrap, derive_seed(step_seed, 1));
      }
    }

    for (const StageValues& sv : stages) {
      const BootstrapResult* boot = nullptr;
      std::size_t slot = 0;
      if (sv.stage == Stage::kRaw && raw_boot) boot = &*raw_boot;
      if (chain_boot && (sv.stage == Stage::kPec || sv.stage == Stage::kMle || sv.stage == Stage::kPs)) {
        boot = &*chain_boot;
        slot = sv.stage == Stage::kPec ? 0 : sv.stage == Stage::kMle ? 1 : 2;
      }
      const std::size_t base = out_layout.offset(slot);

      PopulationRecord rec;
      rec.step = d.step;
      rec.stage = sv.stage;
      rec.values = sv.values;
      rec.err_lo = RealVector::Zero(static_cast<Eigen::Index>(dim));
      rec.err_hi = RealVector::Zero(static_cast<Eigen::Index>(dim));
      if (boot) {
        for (std::size_t i = 0; i < dim; ++i) {
          rec.err_lo(static_cast<Eigen::Index>(i)) = boot->err_lo[base + i];
          rec.err_hi(static_cast<Eigen::Index>(i)) = boot->err_hi[base + i];
        }
      }
      b.populations.push_back(std::move(rec));

      FidelityRecord f;
      f.step = d.step;
      f.stage = sv.stage;
      f.value = population_fidelity(view(sv.values), view(d.ideal), FidelityMode::kNormalized);
      f.unnormalized = population_fidelity(view(sv.values), view(d.ideal), FidelityMode::kRaw);
      if (boot) {
        f.err_lo = boot->err_lo[base + dim];
        f.err_hi = boot->err_hi[base + dim];
      }
      b.fidelities.push_back(f);

      for (int s = 0; s < sites; ++s) {
        const SpinCharge sc = spin_charge(view(sv.values), *layout, s);
        SpinChargeRecord r;
        r.step = d.step;
        r.stage = sv.stage;
        r.site = s;
        r.spin = sc.spin;
        r.charge = sc.charge;
        if (boot) {
          const std::size_t at = base + dim + 2 + 2 * static_cast<std::size_t>(s);
          r.spin_err = boot->stddev[at];
          r.charge_err = boot->stddev[at + 1];
        }
        b.spin_charge.push_back(r);
      }
    }
  }

  if (b.data.size() >= 3 && b.gates_per_step > 0) {
    for (Stage stage : {Stage::kNoisy, Stage::kRaw, Stage::kPec, Stage::kMle, Stage::kPs}) {
      std::vector<double> steps;
      std::vector<double> values;
      for (const auto& f : b.fidelities) {
        if (f.stage != stage) continue;
        steps.push_back(f.step);
        values.push_back(f.value);
      }
      if (steps.size() < 3) continue;
      try {
        b.fits[stage] = fit_fidelity_per_gate(steps, values, b.gates_per_step);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kFitDegenerate) throw;
      }
    }
  }
}

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  ResultBundle b = simulate_experiment(cfg);
  mitigate(b);
  return b;
}

}  // namespace pecsim
