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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "pecsim/errors.hpp"
#include "pecsim/experiment.hpp"

using namespace pecsim;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pecsim_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig quick(std::string_view name) {
  ExperimentConfig cfg = preset(name);
  cfg.samples = 60;
  cfg.shots = 100;
  cfg.raw_shots = 500;
  cfg.shots_per_setting = 2000;
  cfg.bootstrap = 100;
  return cfg;
}

ExperimentConfig exact(std::string_view name) {
  ExperimentConfig cfg = preset(name);
  cfg.pec_mode = PecMode::kOracle;
  cfg.exact_characterization = true;
  return cfg;
}

struct PresetRow {
  const char* name;
  int sites;
  Components components;
  double u;
  double v;
  int steps;
  double phi;
  std::vector<std::string> initial;
  std::size_t samples;
};

}  // namespace

TEST(Presets, FrozenTable) {
  const double pi = std::numbers::pi;
  const std::vector<PresetRow> rows{
      {"two_spinless", 2, Components::kOne, 0.0, 2.0, 8, pi / 4.0, {"11", "10"}, 1000},
      {"three_spinless", 3, Components::kOne, 0.0, 2.0, 4, pi / 8.0, {"101", "110"}, 1500},
      {"three_spinless_v0", 3, Components::kOne, 0.0, 0.0, 4, pi / 8.0, {"101", "110"}, 1500},
      {"two_site_spinful", 2, Components::kTwo, 2.0, 0.0, 4, pi / 8.0, {"1001", "1010"}, 2000},
      {"two_site_spinful_u0", 2, Components::kTwo, 0.0, 0.0, 4, pi / 8.0, {"1001", "1010"}, 2000},
  };
  ASSERT_EQ(preset_names().size(), rows.size());
  for (const PresetRow& r : rows) {
    const ExperimentConfig cfg = preset(r.name);
    EXPECT_EQ(cfg.name, r.name);
    EXPECT_EQ(cfg.model.sites, r.sites);
    EXPECT_EQ(cfg.model.components, r.components);
    EXPECT_EQ(cfg.model.tunneling, 1.0);
    EXPECT_EQ(cfg.model.onsite, r.u);
    EXPECT_EQ(cfg.model.neighbor, r.v);
    EXPECT_EQ(cfg.steps, r.steps);
    EXPECT_DOUBLE_EQ(cfg.phi, r.phi);
    EXPECT_EQ(cfg.samples, r.samples);
    EXPECT_EQ(cfg.shots, 300);
    ASSERT_EQ(cfg.initial_state.size(), r.initial.size());
    for (std::size_t i = 0; i < r.initial.size(); ++i) {
      EXPECT_EQ(cfg.initial_state[i].first, r.initial[i]);
      EXPECT_NEAR(std::abs(cfg.initial_state[i].second), 1.0 / std::sqrt(2.0), 1e-15);
    }
    EXPECT_NO_THROW(cfg.validate());
  }
  EXPECT_EQ(code_of([] { preset("nope"); }), ErrorCode::kConfigError);
}

TEST(Presets, NoiseCalibrationTargets) {
  const NoiseModel two = preset("two_spinless").noise.build();
  const Ptm ideal = Ptm::identity(2);
  EXPECT_NEAR(average_gate_fidelity(pauli_channel_ptm(two.per_gate.at("*")), ideal), 0.9811, 1e-9);

  const ExperimentConfig three = preset("three_spinless");
  const NoiseModel nm3 = three.noise.build();
  EXPECT_NEAR(decompose_inverse(pauli_channel_ptm(nm3.per_gate.at("YY(0,1)"))).cost, 1.157, 1e-9);
  EXPECT_NEAR(decompose_inverse(pauli_channel_ptm(nm3.per_gate.at("YY(1,2)"))).cost, 1.171, 1e-9);

  const NoiseModel nm4 = preset("two_site_spinful").noise.build();
  const std::map<std::string, double> costs{
      {"YY(0,1)", 1.211}, {"YY(2,3)", 1.228}, {"YY(0,2)", 1.228}, {"YY(1,3)", 1.223}};
  for (const auto& [key, c] : costs) {
    EXPECT_NEAR(decompose_inverse(pauli_channel_ptm(nm4.per_gate.at(key))).cost, c, 1e-9) << key;
  }
}

TEST(Calibration, DepolarizingFidelityTarget) {
  const PauliChannel ch = calibrate_channel("depolarizing", 0.9811);
  EXPECT_NEAR(1.0 - ch.weights()[0], 0.0252 * 15.0 / 16.0, 2e-4);
  EXPECT_NEAR(average_gate_fidelity(pauli_channel_ptm(ch), Ptm::identity(2)), 0.9811, 1e-10);
  EXPECT_NEAR(bisect_parameter([](double x) { return x * x; }, 2.0, 0.0, 2.0), std::sqrt(2.0), 1e-10);
}

TEST(Config, JsonRoundTrip) {
  for (const std::string& name : preset_names()) {
    ExperimentConfig cfg = preset(name);
    cfg.noise.overrotation["YY(0,1)"] = 0.01;
    Confusion c;
    c << 0.99, 0.02, 0.01, 0.98;
    cfg.noise.readout.assign(static_cast<std::size_t>(cfg.model.qubit_count()), c);
    const std::string text = config_to_json(cfg);
    const ExperimentConfig back = config_from_json(text);
    EXPECT_EQ(config_to_json(back), text) << name;
    EXPECT_EQ(back.samples, cfg.samples);
    EXPECT_EQ(back.noise.readout.size(), cfg.noise.readout.size());
    EXPECT_EQ(back.initial_state, cfg.initial_state);
  }
}

TEST(Config, PresetBaseWithOverrides) {
  const ExperimentConfig cfg = config_from_json(R"({
    "preset": "two_spinless",
    "name": "tweaked",
    "pec": {"samples": 10, "mode": "oracle"},
    "initial_state": {"10": 1.0},
    "noise": {"default": {"type": "depolarizing", "p": 0.01}}
  })");
  EXPECT_EQ(cfg.name, "tweaked");
  EXPECT_EQ(cfg.samples, 10u);
  EXPECT_EQ(cfg.pec_mode, PecMode::kOracle);
  EXPECT_EQ(cfg.steps, 8);
  EXPECT_NEAR(std::norm(cfg.initial_vector()(2)), 1.0, 1e-15);
  EXPECT_NEAR(cfg.noise.build().per_gate.at("*").weights()[0], 1.0 - 0.01 * 15.0 / 16.0, 1e-15);
}

TEST(Config, ErrorsNameFieldAndLine) {
  const std::string unknown = message_of([] {
    config_from_json(R"({"preset": "two_spinless", "pec": {"samplez": 3}})");
  });
  EXPECT_NE(unknown.find("pec.samplez"), std::string::npos) << unknown;

  const std::string wrong_type = message_of([] {
    config_from_json(R"({"preset": "two_spinless", "trotter": {"steps": "many"}})");
  });
  EXPECT_NE(wrong_type.find("trotter.steps"), std::string::npos) << wrong_type;

  const std::string syntax = message_of([] { config_from_json("{\n  \"name\": \"x\",\n  oops\n}"); });
  EXPECT_NE(syntax.find("line 3"), std::string::npos) << syntax;

  EXPECT_EQ(code_of([] { config_from_json(R"({"preset": "two_spinless", "trotter": {"steps": 0}})"); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { config_from_json(R"({"preset": "two_spinless", "initial_state": "101"})"); }),
            ErrorCode::kConfigError);
}

TEST(Pipeline, StepCircuitsArePrefixes) {
  for (const std::string& name : preset_names()) {
    const ExperimentConfig cfg = preset(name);
    const Circuit full = experiment_circuit(cfg, cfg.steps);
    EXPECT_TRUE(experiment_circuit(cfg, 0).gates.empty());
    for (int k = 1; k < cfg.steps; ++k) {
      const Circuit prefix = experiment_circuit(cfg, k);
      ASSERT_LE(prefix.gates.size(), full.gates.size());
      EXPECT_EQ(prefix.entangling_count() * static_cast<std::size_t>(cfg.steps),
                full.entangling_count() * static_cast<std::size_t>(k));
      for (std::size_t g = 0; g < prefix.gates.size(); ++g) {
        EXPECT_EQ(prefix.gates[g].index(), full.gates[g].index());
      }
      // Populations of the prefix equal the intermediate state of the full run.
      Circuit cut = full;
      cut.gates.resize(prefix.gates.size());
      EXPECT_LT((run_ideal(prefix, cfg.initial_vector()) - run_ideal(cut, cfg.initial_vector())).norm(), 1e-12);
    }
  }
}

TEST(Pipeline, ExactModeReproducesIdealEverywhere) {
  for (const std::string& name : preset_names()) {
    const ResultBundle b = run_experiment(exact(name));
    ASSERT_EQ(b.data.size(), static_cast<std::size_t>(b.config.steps + 1));
    for (const StepData& d : b.data) {
      EXPECT_LT((d.pec_oracle - d.ideal).cwiseAbs().maxCoeff(), 1e-9) << name << " step " << d.step;
      const PopulationRecord* pec = b.find(d.step, Stage::kPec);
      ASSERT_NE(pec, nullptr);
      EXPECT_LT((pec->values - d.ideal).cwiseAbs().maxCoeff(), 1e-9);
    }
    EXPECT_NEAR(b.fits.at(Stage::kPec).per_gate, 1.0, 1e-9) << name;
    EXPECT_LT(b.fits.at(Stage::kNoisy).per_gate, 1.0) << name;
  }
}

TEST(Pipeline, ZeroNoiseNoisyEqualsIdeal) {
  ExperimentConfig cfg = exact("two_spinless");
  cfg.noise = NoiseSpec{};
  const ResultBundle b = run_experiment(cfg);
  for (const StepData& d : b.data) EXPECT_LT((d.noisy - d.ideal).norm(), 1e-10);
  for (const auto& [stage, fit] : b.fits) EXPECT_NEAR(fit.per_gate, 1.0, 1e-9) << stage_name(stage);
  EXPECT_NEAR(b.data.back().cost, 1.0, 1e-12);
}

TEST(Pipeline, SampledRunHasAllStages) {
  const ResultBundle b = run_experiment(quick("two_spinless"));
  EXPECT_EQ(b.gates_per_step, 3);
  EXPECT_EQ(b.mitigated_stage(), Stage::kPs);
  for (int k = 0; k <= 8; ++k) {
    for (Stage s : {Stage::kIdeal, Stage::kNoisy, Stage::kRaw, Stage::kPec, Stage::kMle, Stage::kPs}) {
      ASSERT_NE(b.find(k, s), nullptr) << k << " " << stage_name(s);
    }
    const PopulationRecord* mle = b.find(k, Stage::kMle);
    EXPECT_NEAR(mle->values.sum(), 1.0, 1e-9);
    EXPECT_GE(mle->values.minCoeff(), 0.0);
    const FidelityRecord* f = b.find_fidelity(k, Stage::kPs);
    ASSERT_NE(f, nullptr);
    EXPECT_GE(f->err_lo, 0.0);
    EXPECT_GE(f->err_hi, 0.0);
  }
  EXPECT_NEAR(b.data[8].cost, circuit_cost(b.decompositions, experiment_circuit(b.config, 8)), 1e-12);
  // Finite-shot characterization lands near the calibrated 1.0485 per gate.
  EXPECT_NEAR(std::pow(b.data[8].cost, 1.0 / 24.0), 1.0485, 0.01);
}

TEST(Pipeline, SpinChargeFollowsOnsiteInteraction) {
  auto gap = [](const ResultBundle& b) {
    double worst = 0.0;
    double s0 = 0.0;
    double c0 = 0.0;
    for (const SpinChargeRecord& r : b.spin_charge) {
      if (r.stage != Stage::kIdeal || r.site != 0) continue;
      if (r.step == 0) {
        s0 = r.spin;
        c0 = r.charge;
      }
      worst = std::max(worst, std::abs((r.spin - s0) - (r.charge - c0)));
    }
    return worst;
  };
  EXPECT_LT(gap(run_experiment(exact("two_site_spinful_u0"))), 1e-9);
  EXPECT_GT(gap(run_experiment(exact("two_site_spinful"))), 0.05);
}

TEST(Report, WritesNamedFilesDeterministically) {
  const fs::path a = scratch("report_a");
  const fs::path b = scratch("report_b");
  const std::vector<std::string> files = report(run_experiment(quick("two_spinless")), a);
  report(run_experiment(quick("two_spinless")), b);
  for (const char* f : {"populations_ideal.csv", "populations_raw.csv", "populations_mitigated.csv",
                        "fidelity.csv", "costs.csv", "fits.json", "summary.json"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_FALSE(fs::exists(a / ".staging"));
  EXPECT_EQ(slurp(a / "populations_raw.csv").substr(0, 43), "step,stage,basis_label,value,err_lo,err_hi\n");
  EXPECT_FALSE(files.empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Report, EmptyBundleWritesNothing) {
  const fs::path dir = scratch("report_empty");
  ResultBundle empty;
  EXPECT_EQ(code_of([&] { report(empty, dir); }), ErrorCode::kInsufficientData);
  EXPECT_FALSE(fs::exists(dir) && !fs::is_empty(dir));
}

TEST(Report, SpinfulWritesSpinCharge) {
  const fs::path dir = scratch("report_spin");
  report(run_experiment(exact("two_site_spinful")), dir);
  EXPECT_TRUE(fs::exists(dir / "spin_charge.csv"));
  fs::remove_all(dir);
}

TEST(Bundle, JsonRoundTripRecomputesResults) {
  const ResultBundle b = run_experiment(quick("three_spinless"));
  const std::string text = bundle_to_json(b);
  ResultBundle back = bundle_from_json(text);
  EXPECT_TRUE(back.fidelities.empty());
  mitigate(back);
  EXPECT_EQ(bundle_to_json(back), text);
  EXPECT_EQ(back.fits.at(Stage::kPs).per_gate, b.fits.at(Stage::kPs).per_gate);
  ASSERT_EQ(back.fidelities.size(), b.fidelities.size());
  for (std::size_t i = 0; i < b.fidelities.size(); ++i) {
    EXPECT_EQ(back.fidelities[i].value, b.fidelities[i].value);
    EXPECT_EQ(back.fidelities[i].err_hi, b.fidelities[i].err_hi);
  }
  EXPECT_EQ(content_hash(text), content_hash(bundle_to_json(back)));
  EXPECT_EQ(content_hash("").size(), 16u);
  EXPECT_NE(content_hash("a"), content_hash("b"));
}

TEST(Cli, RunAndReportSmoke) {
  const fs::path dir = scratch("cli");
  const std::string cli = PECSIM_CLI_PATH;
  const std::string run = "\"" + cli + "\" run --preset two_spinless --exact --seed 5 --out \"" +
                          dir.string() + "\" > \"" + (dir.string() + ".stdout") + "\"";
  ASSERT_EQ(std::system(run.c_str()), 0);
  for (const char* f : {"manifest.json", "bundle.json", "config.json", "fidelity.csv",
                        "populations_mitigated.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_NE(slurp(dir.string() + ".stdout").find("per_gate"), std::string::npos);

  const fs::path again = scratch("cli_report");
  const std::string rep = "\"" + cli + "\" report --bundle \"" + (dir / "bundle.json").string() +
                          "\" --out \"" + again.string() + "\" > /dev/null";
  ASSERT_EQ(std::system(rep.c_str()), 0);
  EXPECT_EQ(slurp(again / "fidelity.csv"), slurp(dir / "fidelity.csv"));

  const std::string bad = "\"" + cli + "\" run --preset nope --out \"" + dir.string() + "\" 2> \"" +
                          (dir.string() + ".stderr") + "\"";
  EXPECT_NE(std::system(bad.c_str()), 0);
  const std::string err = slurp(dir.string() + ".stderr");
  EXPECT_NE(err.find("\"code\""), std::string::npos) << err;
  EXPECT_NE(err.find("ConfigError"), std::string::npos) << err;

  const std::string dump = "cd \"" + again.string() + "\" && \"" + cli + "\" preset two_spinless -o cfg.json";
  ASSERT_EQ(std::system(dump.c_str()), 0);
  EXPECT_EQ(config_from_json(slurp(again / "cfg.json")).name, "two_spinless");

  fs::remove_all(dir);
  fs::remove_all(again);
  fs::remove(dir.string() + ".stdout");
  fs::remove(dir.string() + ".stderr");
}
