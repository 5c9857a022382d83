// Copyright 2026 The loccsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "locc/experiment.hpp"

namespace {

using locc::experiment::ExperimentConfig;
using locc::experiment::ExperimentKind;

ExperimentConfig load_base_config(const CLI::App* sub) {
  if (sub->count("--config") == 0) return ExperimentConfig{};
  const auto path = sub->get_option("--config")->as<std::string>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw locc::IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw locc::ConfigError(std::string("bad config file: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

// Command-line flags override whatever the config file provided.
void apply_overrides(const CLI::App* sub, ExperimentConfig* cfg) {
  auto opt = [&](const char* name) { return sub->get_option_no_throw(name); };
  auto has = [&](const char* name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (has("--seed")) cfg->seed = opt("--seed")->as<std::uint64_t>();
  if (has("--rounds")) cfg->rounds_per_pair = opt("--rounds")->as<long>();
  if (has("--alpha")) cfg->alpha = opt("--alpha")->as<double>();
  if (has("--threads")) cfg->threads = opt("--threads")->as<int>();
  if (has("--state")) cfg->state = opt("--state")->as<std::string>();
  if (has("--werner-p")) cfg->werner_p = opt("--werner-p")->as<double>();
  if (has("--ghz-qubits")) cfg->ghz_qubits = opt("--ghz-qubits")->as<int>();
  if (has("--state-file"))
    cfg->state_file = opt("--state-file")->as<std::string>();
  if (has("--switch")) {
    const auto v = opt("--switch")->as<std::string>();
    if (v == "on")
      cfg->switch_on = true;
    else if (v == "off")
      cfg->switch_on = false;
    else
      throw locc::ConfigError("--switch takes 'on' or 'off'");
  }
  if (has("--strength"))
    cfg->switch_strength = opt("--strength")->as<double>();
  if (has("--angles-a")) {
    const auto v = opt("--angles-a")->as<std::vector<double>>();
    cfg->angles_a = {v[0], v[1]};
  }
  if (has("--angles-b")) {
    const auto v = opt("--angles-b")->as<std::vector<double>>();
    cfg->angles_b = {v[0], v[1]};
  }
  if (has("--machine")) cfg->machine = opt("--machine")->as<std::string>();
  if (has("--machine-a"))
    cfg->machine_a = opt("--machine-a")->as<std::string>();
  if (has("--machine-b"))
    cfg->machine_b = opt("--machine-b")->as<std::string>();
  if (has("--strategy")) cfg->strategy = opt("--strategy")->as<std::string>();
  if (has("--circuit")) cfg->circuit_file = opt("--circuit")->as<std::string>();
  if (has("--param")) cfg->sweep_param = opt("--param")->as<std::string>();
  if (has("--values"))
    cfg->sweep_values = opt("--values")->as<std::vector<double>>();
  if (has("--out")) cfg->out = opt("--out")->as<std::string>();
}

void add_common_options(CLI::App* sub) {
  sub->add_option("--config", "JSON config file; flags override its values");
  sub->add_option("--seed", "master seed; omitted means fresh OS entropy");
  sub->add_option("--threads", "worker threads for sampling");
  sub->add_option("--out", "output file; relative paths land in LOCCSIM_OUT_DIR");
}

void add_state_options(CLI::App* sub) {
  sub->add_option("--state", "state preset: bell, werner, product, ghz, custom");
  sub->add_option("--werner-p", "Werner mixing parameter in [0, 1]");
  sub->add_option("--ghz-qubits", "register size for the ghz preset");
  sub->add_option("--state-file", "matrix dump for the custom preset");
}

void add_game_options(CLI::App* sub) {
  sub->add_option("--rounds", "rounds per setting pair");
  sub->add_option("--switch", "decoherence switch: on or off");
  sub->add_option("--strength", "decoherence strength in [0, 1]");
  sub->add_option("--angles-a", "A's two measurement angles")->type_size(2);
  sub->add_option("--angles-b", "B's two measurement angles")->type_size(2);
  sub->add_option("--strategy",
                  "classical strategy table 'w:a1,a2,b1,b2;...'");
}

int run_and_report(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const locc::experiment::RunOutput out = locc::experiment::run(cfg);
  const auto stop = std::chrono::steady_clock::now();
  const double ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  for (const auto& row : out.rows) {
    std::ostringstream line;
    for (std::size_t i = 0; i < row.columns.size(); ++i) {
      if (i) line << "  ";
      line << row.columns[i].first << '=' << row.columns[i].second;
    }
    std::cout << line.str() << '\n';
  }
  for (const auto& f : out.files_written) std::cout << "wrote " << f << '\n';
  std::cout << "seed " << out.resolved_seed << '\n';
  std::cout << "elapsed-ms " << ms << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal-game verification and causal-consistency simulator"};
  app.require_subcommand(1);
  int exit_code = 0;

  auto make_sub = [&](const char* name, const char* desc, ExperimentKind kind) {
    CLI::App* sub = app.add_subcommand(name, desc);
    add_common_options(sub);
    sub->callback([sub, kind, &exit_code] {
      ExperimentConfig cfg = load_base_config(sub);
      cfg.experiment = kind;
      apply_overrides(sub, &cfg);
      exit_code = run_and_report(cfg);
    });
    return sub;
  };

  CLI::App* chsh = make_sub(
      "chsh", "run the question/answer game and estimate the combination",
      ExperimentKind::Chsh);
  add_state_options(chsh);
  add_game_options(chsh);
  chsh->add_option("--machine",
                   "separable, monolithic, monolithic-purified, classical");

  CLI::App* disc = make_sub(
      "discriminate", "compare two machines' transcripts statistically",
      ExperimentKind::Discriminate);
  add_state_options(disc);
  add_game_options(disc);
  disc->add_option("--machine-a", "first machine preset");
  disc->add_option("--machine-b", "second machine preset");
  disc->add_option("--alpha", "rejection threshold in (0, 1)");

  CLI::App* ctc = make_sub("ctc", "solve a causal-consistency fixed point",
                           ExperimentKind::Ctc);
  ctc->add_option("--circuit", "circuit description file");

  CLI::App* entropy = make_sub("entropy", "entropy report for a state preset",
                               ExperimentKind::Entropy);
  add_state_options(entropy);

  CLI::App* sweep = make_sub("sweep", "exact metrics over a parameter grid",
                             ExperimentKind::Sweep);
  add_state_options(sweep);
  sweep->add_option("--switch", "decoherence switch: on or off");
  sweep->add_option("--strength", "decoherence strength in [0, 1]");
  sweep->add_option("--angles-a", "A's two measurement angles")->type_size(2);
  sweep->add_option("--angles-b", "B's two measurement angles")->type_size(2);
  sweep->add_option("--param", "swept parameter: werner-p or strength");
  sweep->add_option("--values", "grid values")
      ->expected(CLI::detail::expected_max_vector_size);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const locc::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const locc::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const locc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}
