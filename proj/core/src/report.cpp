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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_io.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/experiment.hpp"

namespace pecsim {
namespace {

using detail::Json;
using detail::JsonReader;

namespace fs = std::filesystem;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

std::string population_csv(const ResultBundle& b, std::initializer_list<Stage> stages) {
  std::ostringstream os;
  os << "step,stage,basis_label,value,err_lo,err_hi\n";
  for (Stage stage : stages) {
    for (const auto& r : b.populations) {
      if (r.stage != stage) continue;
      for (Eigen::Index i = 0; i < r.values.size(); ++i) {
        os << r.step << ',' << stage_name(stage) << ','
           << basis_label(static_cast<std::size_t>(i), b.qubit_count) << ',' << num(r.values(i))
           << ',' << num(r.err_lo(i)) << ',' << num(r.err_hi(i)) << '\n';
      }
    }
  }
  return os.str();
}

Json fit_json(const FidelityFit& f) {
  return Json{{"per_gate", f.per_gate},
              {"standard_error", f.standard_error},
              {"amplitude", f.amplitude}};
}

Json fits_json(const ResultBundle& b) {
  Json fits = Json::object();
  for (const auto& [stage, fit] : b.fits) fits[stage_name(stage)] = fit_json(fit);
  return Json{{"gates_per_step", b.gates_per_step}, {"fits", std::move(fits)}};
}

Json summary_json(const ResultBundle& b) {
  Json costs = Json::object();
  for (const auto& [id, d] : b.decompositions) costs[id] = d.cost;
  Json final_fid = Json::object();
  const int last = b.data.back().step;
  for (const auto& f : b.fidelities) {
    if (f.step == last) {
      final_fid[stage_name(f.stage)] = {{"fidelity", f.value},
                                        {"fidelity_unnormalized", f.unnormalized}};
    }
  }
  return Json{{"name", b.config.name},
              {"qubit_count", b.qubit_count},
              {"steps", b.config.steps},
              {"gates_per_step", b.gates_per_step},
              {"mitigated_stage", stage_name(b.mitigated_stage())},
              {"gate_costs", std::move(costs)},
              {"circuit_cost", b.data.back().cost},
              {"final_fidelities", std::move(final_fid)},
              {"leakage", b.leakage},
              {"fits", fits_json(b)["fits"]}};
}

}  // namespace

std::vector<std::string> report(const ResultBundle& b, const fs::path& out_dir) {
  if (b.empty() || b.populations.empty()) {
    throw Error(ErrorCode::kInsufficientData, "empty result bundle: nothing to report");
  }

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("populations_ideal.csv", population_csv(b, {Stage::kIdeal}));
  files.emplace_back("populations_raw.csv", population_csv(b, {Stage::kNoisy, Stage::kRaw}));
  files.emplace_back("populations_mitigated.csv",
                     population_csv(b, {Stage::kPec, Stage::kMle, Stage::kPs}));

  {
    std::ostringstream os;
    os << "step,stage,fidelity,fidelity_unnormalized,err_lo,err_hi\n";
    for (Stage stage : {Stage::kIdeal, Stage::kNoisy, Stage::kRaw, Stage::kPec, Stage::kMle,
                        Stage::kPs}) {
      for (const auto& f : b.fidelities) {
        if (f.stage != stage) continue;
        os << f.step << ',' << stage_name(stage) << ',' << num(f.value) << ','
           << num(f.unnormalized) << ',' << num(f.err_lo) << ',' << num(f.err_hi) << '\n';
      }
    }
    files.emplace_back("fidelity.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "step,entangling_gates,cost\n";
    for (const auto& d : b.data) os << d.step << ',' << d.entangling_gates << ',' << num(d.cost) << '\n';
    files.emplace_back("costs.csv", os.str());
  }
  if (!b.spin_charge.empty()) {
    std::ostringstream os;
    os << "step,stage,site,spin,charge,spin_err,charge_err\n";
    for (Stage stage : {Stage::kIdeal, Stage::kNoisy, Stage::kRaw, Stage::kPec, Stage::kMle,
                        Stage::kPs}) {
      for (const auto& r : b.spin_charge) {
        if (r.stage != stage) continue;
        os << r.step << ',' << stage_name(stage) << ',' << r.site << ',' << num(r.spin) << ','
           << num(r.charge) << ',' << num(r.spin_err) << ',' << num(r.charge_err) << '\n';
      }
    }
    files.emplace_back("spin_charge.csv", os.str());
  }
  files.emplace_back("fits.json", fits_json(b).dump(2) + "\n");
  files.emplace_back("summary.json", summary_json(b).dump(2) + "\n");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + out_dir.string() + ": " + ec.message());
  const fs::path staging = out_dir / ".staging";
  fs::remove_all(staging, ec);
  fs::create_directories(staging, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + staging.string());
  try {
    for (const auto& [name, content] : files) write_file(staging / name, content);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  std::vector<std::string> names;
  for (const auto& [name, content] : files) {
    fs::rename(staging / name, out_dir / name, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot move " + name + ": " + ec.message());
    names.push_back(name);
  }
  fs::remove_all(staging, ec);
  return names;
}

std::string bundle_to_json(const ResultBundle& b) {
  Json chars = Json::array();
  for (const auto& c : b.characterizations) chars.push_back(detail::to_json_value(c));
  Json decomps = Json::array();
  for (const auto& [id, d] : b.decompositions) decomps.push_back(detail::to_json_value(d));
  Json steps = Json::array();
  for (const auto& d : b.data) {
    Json s{{"step", d.step},
           {"entangling_gates", d.entangling_gates},
           {"cost", d.cost},
           {"ideal", detail::to_json_value(d.ideal)},
           {"noisy", detail::to_json_value(d.noisy)}};
    if (d.raw_counts.shots > 0) s["raw_counts"] = detail::to_json_value(d.raw_counts);
    if (!d.pec.samples.empty()) {
      Json samples = Json::array();
      for (const auto& rec : d.pec.samples) samples.push_back(detail::to_json_value(rec));
      s["pec"] = {{"cost", d.pec.cost},
                  {"shots", d.pec.shots},
                  {"observables", d.pec.observables},
                  {"samples", std::move(samples)}};
    }
    if (d.pec_oracle.size() > 0) s["pec_oracle"] = detail::to_json_value(d.pec_oracle);
    steps.push_back(std::move(s));
  }
  const Json j{{"format", "pecsim-bundle"},
               {"version", 1},
               {"config", Json::parse(config_to_json(b.config))},
               {"qubit_count", b.qubit_count},
               {"gates_per_step", b.gates_per_step},
               {"characterizations", std::move(chars)},
               {"decompositions", std::move(decomps)},
               {"steps", std::move(steps)}};
  return j.dump() + "\n";
}

ResultBundle bundle_from_json(std::string_view text) {
  const Json root = detail::parse_json(text);
  const JsonReader in(root, "");
  if (in.get<std::string>("format") != "pecsim-bundle") {
    detail::field_error("format", "not a result bundle");
  }
  ResultBundle b;
  b.config = config_from_json(in.at("config").dump());
  b.qubit_count = in.get<int>("qubit_count");
  b.gates_per_step = in.get<int>("gates_per_step");
  const Json& chars = in.at("characterizations");
  for (std::size_t i = 0; i < chars.size(); ++i) {
    b.characterizations.push_back(detail::characterization_from_json(
        chars[i], "characterizations[" + std::to_string(i) + "]"));
  }
  const Json& decomps = in.at("decompositions");
  for (std::size_t i = 0; i < decomps.size(); ++i) {
    QuasiProbDecomposition d =
        detail::decomposition_from_json(decomps[i], "decompositions[" + std::to_string(i) + "]");
    const std::string id = d.gate_id;
    b.decompositions.emplace(id, std::move(d));
  }
  const Json& steps = in.at("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string sp = "steps[" + std::to_string(i) + "]";
    const JsonReader s(steps[i], sp);
    StepData d;
    d.step = s.get<int>("step");
    d.entangling_gates = s.get<std::size_t>("entangling_gates");
    d.cost = s.get<double>("cost");
    d.ideal = detail::vector_from_json(s.at("ideal"), sp + ".ideal");
    d.noisy = detail::vector_from_json(s.at("noisy"), sp + ".noisy");
    if (s.has("raw_counts")) d.raw_counts = detail::counts_from_json(s.at("raw_counts"), sp + ".raw_counts");
    if (s.has("pec")) {
      const JsonReader p = s.object("pec");
      d.pec.cost = p.get<double>("cost");
      d.pec.shots = p.get<std::int64_t>("shots");
      d.pec.observables = p.get<std::vector<std::string>>("observables");
      const Json& samples = p.at("samples");
      d.pec.samples.reserve(samples.size());
      for (std::size_t k = 0; k < samples.size(); ++k) {
        d.pec.samples.push_back(detail::sample_from_json(
            samples[k], sp + ".pec.samples[" + std::to_string(k) + "]"));
      }
    }
    if (s.has("pec_oracle")) d.pec_oracle = detail::vector_from_json(s.at("pec_oracle"), sp + ".pec_oracle");
    b.data.push_back(std::move(d));
  }
  return b;
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pecsim
