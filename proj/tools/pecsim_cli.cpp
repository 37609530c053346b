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
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/experiment.hpp"
#include "pecsim/rng.hpp"
#include "pecsim/serialization.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string preset_name;
  std::string out_dir = "pecsim_out";
  std::optional<std::uint64_t> seed;
  bool exact = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pecsim::Error(pecsim::ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw pecsim::Error(pecsim::ErrorCode::kIoError, "cannot write " + path.string());
}

// Gate ids contain characters that are awkward in file names.
std::string file_stem(const std::string& gate_id) {
  std::string out;
  for (char c : gate_id) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      out.push_back(c);
    } else if (c == '@') {
      out.push_back('_');
    } else if (c == ',') {
      out.push_back('-');
    }
  }
  return out;
}

pecsim::ExperimentConfig load_config(const GlobalOptions& g) {
  if (!g.config_path.empty() && !g.preset_name.empty()) {
    throw pecsim::Error(pecsim::ErrorCode::kConfigError, "use either --config or --preset");
  }
  pecsim::ExperimentConfig cfg = g.config_path.empty()
                                     ? pecsim::preset(g.preset_name.empty() ? "two_spinless"
                                                                            : g.preset_name)
                                     : pecsim::config_from_json(read_file(g.config_path));
  if (g.seed) {
    cfg.master_seed = *g.seed;
    cfg.characterization_seed = *g.seed + 1;
    cfg.bootstrap_seed = *g.seed + 2;
  }
  if (g.exact) {
    cfg.pec_mode = pecsim::PecMode::kOracle;
    cfg.exact_characterization = true;
  }
  cfg.validate();
  return cfg;
}

std::vector<pecsim::GateCharacterization> characterize_all(const pecsim::ExperimentConfig& cfg) {
  const pecsim::NoiseModel nm = cfg.noise.build();
  std::map<std::string, pecsim::EntanglingGate> distinct;
  const pecsim::Circuit full = pecsim::experiment_circuit(cfg, cfg.steps);
  for (const auto* gate : full.entangling_gates()) {
    distinct.emplace(gate->gate_id, *gate);
  }
  std::vector<pecsim::GateCharacterization> out;
  std::uint64_t i = 0;
  for (const auto& [id, gate] : distinct) {
    out.push_back(pecsim::characterize_gate(
        gate, nm, cfg.exact_characterization ? 0 : cfg.shots_per_setting,
        pecsim::derive_seed(cfg.characterization_seed, i++)));
  }
  return out;
}

Json summary_line(const pecsim::GateCharacterization& ch, const pecsim::QuasiProbDecomposition& d) {
  return Json{{"gate_id", ch.gate_id},
              {"avg_gate_fidelity", pecsim::average_gate_fidelity(ch.estimated_noisy, ch.ideal)},
              {"cost", d.cost},
              {"clipped", d.clipped}};
}

void write_decompositions(const fs::path& out, const pecsim::DecompositionTable& table) {
  for (const auto& [id, d] : table) {
    write_file(out / "decomposition" / (file_stem(id) + ".json"), pecsim::to_json(d) + "\n");
  }
}

void write_characterizations(const fs::path& out,
                             const std::vector<pecsim::GateCharacterization>& chars) {
  for (const auto& ch : chars) {
    write_file(out / "characterization" / (file_stem(ch.gate_id) + ".json"),
               pecsim::to_json(ch) + "\n");
  }
}

Json file_hashes(const fs::path& out, const std::vector<std::string>& names) {
  Json files = Json::object();
  for (const auto& n : names) files[n] = pecsim::content_hash(read_file((out / n).string()));
  return files;
}

void write_manifest(const fs::path& out, const pecsim::ExperimentConfig& cfg,
                    const std::string& command, const std::vector<std::string>& files) {
  const std::string config_text = pecsim::config_to_json(cfg);
  const Json manifest{{"tool", "pecsim"},
                      {"version", PECSIM_VERSION},
                      {"command", command},
                      {"config_name", cfg.name},
                      {"config_hash", pecsim::content_hash(config_text)},
                      {"seeds",
                       {{"master", cfg.master_seed},
                        {"characterization", cfg.characterization_seed},
                        {"bootstrap", cfg.bootstrap_seed}}},
                      {"exact", cfg.pec_mode == pecsim::PecMode::kOracle},
                      {"files", file_hashes(out, files)}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

std::string samples_jsonl(const pecsim::ResultBundle& b) {
  std::string out;
  for (const auto& d : b.data) {
    for (const auto& s : d.pec.samples) {
      Json line = Json::parse(pecsim::to_json(s));
      line["step"] = d.step;
      out += line.dump() + "\n";
    }
  }
  return out;
}

void print_report_summary(const pecsim::ResultBundle& b) {
  Json fits = Json::object();
  for (const auto& [stage, fit] : b.fits) {
    fits[pecsim::stage_name(stage)] = {{"per_gate", fit.per_gate},
                                       {"standard_error", fit.standard_error}};
  }
  std::cout << Json{{"name", b.config.name},
                    {"steps", b.config.steps},
                    {"circuit_cost", b.data.back().cost},
                    {"fits", fits}}
                   .dump(2)
            << "\n";
}

int cmd_preset(bool list, const std::string& name, const std::string& dump_path) {
  if (list || name.empty()) {
    for (const auto& n : pecsim::preset_names()) std::cout << n << "\n";
    return 0;
  }
  const std::string text = pecsim::config_to_json(pecsim::preset(name)) + "\n";
  if (dump_path.empty()) {
    std::cout << text;
  } else {
    write_file(dump_path, text);
  }
  return 0;
}

int cmd_characterize(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto chars = characterize_all(cfg);
  const fs::path out(g.out_dir);
  write_characterizations(out, chars);
  Json lines = Json::array();
  for (const auto& ch : chars) {
    lines.push_back({{"gate_id", ch.gate_id},
                     {"avg_gate_fidelity", pecsim::average_gate_fidelity(ch.estimated_noisy, ch.ideal)}});
  }
  std::cout << lines.dump(2) << "\n";
  return 0;
}

int cmd_decompose(const GlobalOptions& g, const std::vector<std::string>& inputs) {
  std::vector<pecsim::GateCharacterization> chars;
  if (inputs.empty()) {
    chars = characterize_all(load_config(g));
  } else {
    for (const auto& path : inputs) {
      chars.push_back(pecsim::from_json<pecsim::GateCharacterization>(read_file(path)));
    }
  }
  pecsim::DecompositionTable table;
  Json lines = Json::array();
  for (const auto& ch : chars) {
    auto d = pecsim::decompose_characterization(ch);
    lines.push_back(summary_line(ch, d));
    table.emplace(ch.gate_id, std::move(d));
  }
  write_decompositions(fs::path(g.out_dir), table);
  std::cout << lines.dump(2) << "\n";
  return 0;
}

int cmd_run(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const pecsim::ResultBundle b = pecsim::run_experiment(cfg);
  const fs::path out(g.out_dir);
  std::vector<std::string> files = pecsim::report(b, out);
  write_file(out / "config.json", pecsim::config_to_json(cfg) + "\n");
  write_file(out / "bundle.json", pecsim::bundle_to_json(b));
  write_file(out / "samples.jsonl", samples_jsonl(b));
  write_characterizations(out, b.characterizations);
  write_decompositions(out, b.decompositions);
  files.insert(files.end(), {"config.json", "bundle.json", "samples.jsonl"});
  write_manifest(out, cfg, "run", files);
  print_report_summary(b);
  return 0;
}

int cmd_mitigate(const GlobalOptions& g, const std::string& bundle_path, bool no_mle, bool no_ps,
                 std::optional<int> bootstrap, bool report_only) {
  pecsim::ResultBundle b = pecsim::bundle_from_json(read_file(bundle_path));
  if (!report_only) {
    if (no_mle) b.config.mle = false;
    if (no_ps) b.config.ps = false;
    if (bootstrap) b.config.bootstrap = *bootstrap;
    if (g.seed) b.config.bootstrap_seed = *g.seed + 2;
    b.config.validate();
  }
  pecsim::mitigate(b);
  const fs::path out(g.out_dir);
  std::vector<std::string> files = pecsim::report(b, out);
  write_manifest(out, b.config, report_only ? "report" : "mitigate", files);
  print_report_summary(b);
  return 0;
}

void print_error(std::string_view code, std::string_view message) {
  std::cerr << Json{{"code", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pecsim: probabilistic error cancellation for simulated Fermi-Hubbard dynamics"};
  app.require_subcommand(1);
  GlobalOptions g;

  auto add_globals = [&](CLI::App* sub, bool with_config) {
    sub->add_option("--out", g.out_dir, "Output directory");
    sub->add_option("--seed", g.seed, "Master seed (characterization uses seed+1, bootstrap seed+2)");
    sub->add_flag("--exact", g.exact, "Exact expectations: exact characterization and PEC oracle");
    if (with_config) {
      sub->add_option("--config", g.config_path, "Experiment config (JSON)");
      sub->add_option("--preset", g.preset_name, "Built-in preset name");
    }
  };

  bool list = false;
  std::string preset_name;
  std::string dump_path;
  auto* preset_cmd = app.add_subcommand("preset", "List presets or dump one as a config file");
  preset_cmd->add_flag("--list", list, "List preset names");
  preset_cmd->add_option("name", preset_name, "Preset to dump");
  preset_cmd->add_flag("--dump", "Print the preset config (default when a name is given)");
  preset_cmd->add_option("-o,--output", dump_path, "Write the config to this file");

  auto* characterize_cmd = app.add_subcommand("characterize", "Characterize every distinct gate");
  add_globals(characterize_cmd, true);

  std::vector<std::string> inputs;
  auto* decompose_cmd = app.add_subcommand("decompose", "Quasi-probability decompositions");
  add_globals(decompose_cmd, true);
  decompose_cmd->add_option("--input", inputs, "Characterization JSON files");

  auto* run_cmd = app.add_subcommand("run", "Run the full experiment pipeline");
  add_globals(run_cmd, true);

  std::string bundle_path;
  bool no_mle = false;
  bool no_ps = false;
  std::optional<int> bootstrap;
  auto* mitigate_cmd = app.add_subcommand("mitigate", "Re-run post-processing on a result bundle");
  add_globals(mitigate_cmd, false);
  mitigate_cmd->add_option("--bundle", bundle_path, "bundle.json from a run")->required();
  mitigate_cmd->add_flag("--no-mle", no_mle, "Skip the MLE stage");
  mitigate_cmd->add_flag("--no-ps", no_ps, "Skip post-selection");
  mitigate_cmd->add_option("--bootstrap", bootstrap, "Bootstrap replicates (0 disables)");

  auto* report_cmd = app.add_subcommand("report", "Write report files from a result bundle");
  add_globals(report_cmd, false);
  report_cmd->add_option("--bundle", bundle_path, "bundle.json from a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("UsageError", e.what());
    return 2;
  }

  try {
    if (preset_cmd->parsed()) return cmd_preset(list, preset_name, dump_path);
    if (characterize_cmd->parsed()) return cmd_characterize(g);
    if (decompose_cmd->parsed()) return cmd_decompose(g, inputs);
    if (run_cmd->parsed()) return cmd_run(g);
    if (mitigate_cmd->parsed()) {
      return cmd_mitigate(g, bundle_path, no_mle, no_ps, bootstrap, false);
    }
    if (report_cmd->parsed()) return cmd_mitigate(g, bundle_path, false, false, {}, true);
  } catch (const pecsim::Error& e) {
    print_error(pecsim::error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
