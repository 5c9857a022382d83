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

#include "locc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "locc/ctc.hpp"
#include "locc/protocol.hpp"
#include "locc/rng.hpp"

namespace locc::experiment {

namespace {

using nlohmann::json;

std::string default_machine_label(const std::string& key) { return key; }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<protocol::WeightedStrategy> parse_strategy(const std::string& text) {
  if (text.empty()) throw ConfigError("strategy string is empty");
  std::vector<protocol::WeightedStrategy> table;
  double total = 0.0;
  for (const std::string& entry : split(text, ';')) {
    if (entry.empty()) throw ConfigError("empty strategy entry");
    protocol::WeightedStrategy s;
    std::string answers = entry;
    const std::size_t colon = entry.find(':');
    if (colon != std::string::npos) {
      char* end = nullptr;
      s.weight = std::strtod(entry.substr(0, colon).c_str(), &end);
      if (end == entry.c_str() || !(s.weight >= 0.0))
        throw ConfigError("bad strategy weight in '" + entry + "'");
      answers = entry.substr(colon + 1);
    }
    const std::vector<std::string> vals = split(answers, ',');
    if (vals.size() != 4)
      throw ConfigError("strategy needs four answers: '" + entry + "'");
    for (int k = 0; k < 4; ++k) {
      const std::string& v = vals[size_t(k)];
      if (v == "1" || v == "+1")
        s.answers[size_t(k)] = 1;
      else if (v == "-1")
        s.answers[size_t(k)] = -1;
      else
        throw ConfigError("answers must be +1 or -1: '" + entry + "'");
    }
    total += s.weight;
    table.push_back(s);
  }
  if (!(total > 0.0)) throw ConfigError("strategy weights sum to zero");
  for (auto& s : table) s.weight /= total;
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

qmath::DensityMatrix build_state(const ExperimentConfig& config,
                                 bool two_qubits_required) {
  const std::string& s = config.state;
  if (s == "bell") return qmath::bell_phi_plus().density();
  if (s == "werner") return channels::werner_state(config.werner_p);
  if (s == "product") return qmath::basis_state(4, 0).density();
  if (s == "ghz") {
    if (two_qubits_required && config.ghz_qubits != 2)
      throw ConfigError("this experiment needs a two-qubit state");
    return qmath::ghz_state(config.ghz_qubits).density();
  }
  if (s == "custom") {
    if (config.state_file.empty())
      throw ConfigError("state 'custom' needs state-file");
    qmath::DensityMatrix state =
        qmath::DensityMatrix::make(qmath::parse_matrix(read_file(config.state_file)));
    if (two_qubits_required && state.dim() != 4)
      throw ConfigError("this experiment needs a two-qubit state");
    return state;
  }
  throw ConfigError("unknown state preset '" + s + "'");
}

protocol::MachineSpec build_machine(const ExperimentConfig& config,
                                    const std::string& key) {
  const std::string label = default_machine_label(key);
  if (key == "separable")
    return protocol::MachineSpec::separable_provers(build_state(config, true),
                                                    label);
  if (key == "monolithic")
    return protocol::MachineSpec::monolithic(build_state(config, true), false,
                                             label);
  if (key == "monolithic-purified")
    return protocol::MachineSpec::monolithic(build_state(config, true), true,
                                             label);
  if (key == "classical")
    return protocol::MachineSpec::classical(parse_strategy(config.strategy),
                                            label);
  throw ConfigError("unknown machine preset '" + key + "'");
}

games::Settings settings_of(const ExperimentConfig& config) {
  games::Settings s;
  s.angles_a = config.angles_a;
  s.angles_b = config.angles_b;
  return s;
}

channels::DecoherenceSwitch switch_of(const ExperimentConfig& config) {
  return {config.switch_on, config.switch_strength};
}

double exact_combination(const ExperimentConfig& config,
                         const std::string& machine_key) {
  const games::Settings settings = settings_of(config);
  if (machine_key == "classical") {
    const auto table = parse_strategy(config.strategy);
    double m[2][2] = {{0, 0}, {0, 0}};
    for (const auto& s : table)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          m[i][j] += s.weight * double(s.answers[size_t(i)]) *
                     double(s.answers[size_t(2 + j)]);
    return std::abs(m[0][0] + m[0][1] + m[1][0] - m[1][1]);
  }
  const qmath::DensityMatrix eff =
      switch_of(config).applied_to(build_state(config, true));
  return games::exact_chsh(eff, settings);
}

std::string claim_key(protocol::SeparabilityClaim claim) {
  switch (claim) {
    case protocol::SeparabilityClaim::ChannelCertified:
      return "channel-certified";
    case protocol::SeparabilityClaim::CannotCertify:
      return "cannot-certify";
  }
  throw Error("unreachable claim value");
}

std::string decision_key(protocol::Decision decision) {
  return decision == protocol::Decision::Distinguished ? "distinguished"
                                                       : "indistinguishable";
}

std::string results_path(const ExperimentConfig& config) {
  std::string name = config.out;
  if (name.empty()) name = to_key(config.experiment) + "-results.tsv";
  if (!name.empty() && name.front() == '/') return name;
  return output_directory() + "/" + name;
}

std::string stem_of(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".tsv")
    return path.substr(0, path.size() - 4);
  return path;
}

void write_results(const std::string& path, const json& config_echo,
                   const std::vector<std::string>& columns,
                   const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "# loccsim-results v1\n";
  out << "# config " << config_echo.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << '\t';
    out << columns[i];
  }
  out << '\n';
  for (const ResultRow& row : rows) {
    if (row.columns.size() != columns.size())
      throw Error("result row does not match the column schema");
    for (std::size_t i = 0; i < row.columns.size(); ++i) {
      if (row.columns[i].first != columns[i])
        throw Error("result row does not match the column schema");
      if (i) out << '\t';
      out << row.columns[i].second;
    }
    out << '\n';
  }
  write_file(path, out.str());
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  const games::Settings s = games::Settings::canonical();
  angles_a = s.angles_a;
  angles_b = s.angles_b;
}

std::string to_key(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Chsh:
      return "chsh";
    case ExperimentKind::Discriminate:
      return "discriminate";
    case ExperimentKind::Ctc:
      return "ctc";
    case ExperimentKind::Entropy:
      return "entropy";
    case ExperimentKind::Sweep:
      return "sweep";
  }
  throw Error("unreachable experiment kind");
}

ExperimentKind experiment_kind_from_key(const std::string& key) {
  if (key == "chsh") return ExperimentKind::Chsh;
  if (key == "discriminate") return ExperimentKind::Discriminate;
  if (key == "ctc") return ExperimentKind::Ctc;
  if (key == "entropy") return ExperimentKind::Entropy;
  if (key == "sweep") return ExperimentKind::Sweep;
  throw ConfigError("unknown experiment '" + key + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment")
        c.experiment = experiment_kind_from_key(value.get<std::string>());
      else if (key == "seed")
        c.seed = value.get<std::uint64_t>();
      else if (key == "rounds-per-pair")
        c.rounds_per_pair = value.get<long>();
      else if (key == "alpha")
        c.alpha = value.get<double>();
      else if (key == "threads")
        c.threads = value.get<int>();
      else if (key == "state")
        c.state = value.get<std::string>();
      else if (key == "werner-p")
        c.werner_p = value.get<double>();
      else if (key == "ghz-qubits")
        c.ghz_qubits = value.get<int>();
      else if (key == "state-file")
        c.state_file = value.get<std::string>();
      else if (key == "switch-on")
        c.switch_on = value.get<bool>();
      else if (key == "switch-strength")
        c.switch_strength = value.get<double>();
      else if (key == "angles-a")
        c.angles_a = value.get<std::array<double, 2>>();
      else if (key == "angles-b")
        c.angles_b = value.get<std::array<double, 2>>();
      else if (key == "machine")
        c.machine = value.get<std::string>();
      else if (key == "machine-a")
        c.machine_a = value.get<std::string>();
      else if (key == "machine-b")
        c.machine_b = value.get<std::string>();
      else if (key == "strategy")
        c.strategy = value.get<std::string>();
      else if (key == "circuit-file")
        c.circuit_file = value.get<std::string>();
      else if (key == "sweep-param")
        c.sweep_param = value.get<std::string>();
      else if (key == "sweep-values")
        c.sweep_values = value.get<std::vector<double>>();
      else if (key == "out")
        c.out = value.get<std::string>();
      else
        throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = to_key(experiment);
  if (seed) j["seed"] = *seed;
  j["rounds-per-pair"] = rounds_per_pair;
  j["alpha"] = alpha;
  j["threads"] = threads;
  j["state"] = state;
  j["werner-p"] = werner_p;
  j["ghz-qubits"] = ghz_qubits;
  j["state-file"] = state_file;
  j["switch-on"] = switch_on;
  j["switch-strength"] = switch_strength;
  j["angles-a"] = angles_a;
  j["angles-b"] = angles_b;
  j["machine"] = machine;
  j["machine-a"] = machine_a;
  j["machine-b"] = machine_b;
  j["strategy"] = strategy;
  j["circuit-file"] = circuit_file;
  j["sweep-param"] = sweep_param;
  j["sweep-values"] = sweep_values;
  j["out"] = out;
  return j;
}

void ResultRow::add(const std::string& name, const std::string& value) {
  columns.emplace_back(name, value);
}

void ResultRow::add(const std::string& name, double value) {
  columns.emplace_back(name, format_double(value));
}

void ResultRow::add(const std::string& name, long value) {
  columns.emplace_back(name, std::to_string(value));
}

const std::string& ResultRow::at(const std::string& name) const {
  for (const auto& [col, value] : columns)
    if (col == name) return value;
  throw Error("no column named '" + name + "'");
}

std::string output_directory() {
  const char* dir = std::getenv("LOCCSIM_OUT_DIR");
  if (dir && *dir) return dir;
  return ".";
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RunOutput run(const ExperimentConfig& config) {
  if (config.rounds_per_pair < 1)
    throw ConfigError("rounds-per-pair must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (config.threads < 1) throw ConfigError("threads must be >= 1");
  for (double a : config.angles_a)
    if (!std::isfinite(a)) throw ConfigError("angles must be finite");
  for (double a : config.angles_b)
    if (!std::isfinite(a)) throw ConfigError("angles must be finite");

  ExperimentConfig resolved = config;
  if (!resolved.seed) {
    std::random_device entropy;
    resolved.seed = (std::uint64_t(entropy()) << 32) ^ std::uint64_t(entropy());
  }
  const std::uint64_t seed = *resolved.seed;

  RunOutput output;
  output.resolved_seed = seed;
  const std::string path = results_path(resolved);
  const std::string stem = stem_of(path);
  std::vector<std::string> columns;

  switch (resolved.experiment) {
    case ExperimentKind::Chsh: {
      columns = {"machine", "exp", "std-err", "exact-exp", "claim"};
      const auto machine = build_machine(resolved, resolved.machine);
      const auto transcript =
          protocol::run_protocol(machine, switch_of(resolved),
                                 settings_of(resolved), resolved.rounds_per_pair,
                                 seed, resolved.threads);
      const auto est = protocol::chsh_from_transcript(transcript);
      ResultRow row;
      row.add("machine", resolved.machine);
      row.add("exp", est.exp);
      row.add("std-err", est.std_err);
      row.add("exact-exp", exact_combination(resolved, resolved.machine));
      row.add("claim", claim_key(protocol::verifier_separability_claim(transcript)));
      output.rows.push_back(std::move(row));
      const std::string tpath = stem + "-transcript.txt";
      transcript.save_file(tpath);
      output.files_written.push_back(tpath);
      break;
    }
    case ExperimentKind::Discriminate: {
      columns = {"machine-a", "machine-b", "chi-square", "degrees-of-freedom",
                 "p-value", "decision"};
      const auto machine_a = build_machine(resolved, resolved.machine_a);
      const auto machine_b = build_machine(resolved, resolved.machine_b);
      const std::uint64_t seed_a = RngStream::derived(seed, 1000, 1).next_u64();
      const std::uint64_t seed_b = RngStream::derived(seed, 1000, 2).next_u64();
      const auto ta =
          protocol::run_protocol(machine_a, switch_of(resolved),
                                 settings_of(resolved), resolved.rounds_per_pair,
                                 seed_a, resolved.threads);
      const auto tb =
          protocol::run_protocol(machine_b, switch_of(resolved),
                                 settings_of(resolved), resolved.rounds_per_pair,
                                 seed_b, resolved.threads);
      const auto verdict = protocol::discriminate(ta, tb, resolved.alpha);
      ResultRow row;
      row.add("machine-a", resolved.machine_a);
      row.add("machine-b", resolved.machine_b);
      row.add("chi-square", verdict.chi_square);
      row.add("degrees-of-freedom", verdict.degrees_of_freedom);
      row.add("p-value", verdict.p_value);
      row.add("decision", decision_key(verdict.decision));
      output.rows.push_back(std::move(row));
      const std::string pa = stem + "-transcript-a.txt";
      const std::string pb = stem + "-transcript-b.txt";
      ta.save_file(pa);
      tb.save_file(pb);
      output.files_written.push_back(pa);
      output.files_written.push_back(pb);
      break;
    }
    case ExperimentKind::Ctc: {
      columns = {"method", "iterations", "residual", "fixed-subspace-dim"};
      if (resolved.circuit_file.empty())
        throw ConfigError("ctc experiment needs circuit-file");
      const ctc::CircuitFile file = ctc::load_circuit_file(resolved.circuit_file);
      const ctc::CtcCircuit circuit = file.circuit();
      const qmath::DensityMatrix rho_in = file.input_state();
      const ctc::FixedPointResult fp = ctc::solve_fixed_point(circuit, rho_in);
      const qmath::DensityMatrix rho_out = ctc::circuit_output(circuit, rho_in, fp);
      ResultRow row;
      row.add("method", fp.method == ctc::FixedPointMethod::CesaroIteration
                            ? "cesaro"
                            : "eigen");
      row.add("iterations", fp.iterations);
      row.add("residual", fp.residual);
      row.add("fixed-subspace-dim", fp.fixed_subspace_dim);
      output.rows.push_back(std::move(row));
      const std::string fixed_path = stem + "-fixed-point.txt";
      const std::string out_path = stem + "-rho-out.txt";
      write_file(fixed_path, qmath::dump_matrix(fp.rho.matrix()));
      write_file(out_path, qmath::dump_matrix(rho_out.matrix()));
      output.files_written.push_back(fixed_path);
      output.files_written.push_back(out_path);
      break;
    }
    case ExperimentKind::Entropy: {
      columns = {"state", "dim", "von-neumann-entropy", "purity",
                 "max-split-entropy"};
      const qmath::DensityMatrix state = build_state(resolved, false);
      ResultRow row;
      row.add("state", resolved.state);
      row.add("dim", state.dim());
      row.add("von-neumann-entropy", qmath::von_neumann_entropy(state));
      const double purity = state.purity();
      row.add("purity", purity);
      const bool power_of_two = (state.dim() & (state.dim() - 1)) == 0;
      if (purity >= 1.0 - qmath::kPurityTol && power_of_two)
        row.add("max-split-entropy", qmath::max_entanglement_entropy(state));
      else
        row.add("max-split-entropy", "-");
      output.rows.push_back(std::move(row));
      break;
    }
    case ExperimentKind::Sweep: {
      columns = {"param", "value", "exact-exp", "entangled", "violating"};
      const games::Settings settings = settings_of(resolved);
      const bool over_werner = resolved.sweep_param == "werner-p";
      if (!over_werner && resolved.sweep_param != "strength")
        throw ConfigError("unknown sweep parameter '" + resolved.sweep_param +
                          "'; supported: werner-p, strength");
      for (double v : resolved.sweep_values) {
        if (!std::isfinite(v) || !(v >= 0.0 && v <= 1.0))
          throw ConfigError("sweep values must lie in [0, 1]");
        const qmath::DensityMatrix state =
            over_werner
                ? switch_of(resolved).applied_to(channels::werner_state(v))
                : channels::dephasing_channel(2, v).apply(
                      build_state(resolved, true));
        const double exact = games::exact_chsh(state, settings);
        ResultRow row;
        row.add("param", resolved.sweep_param);
        row.add("value", v);
        row.add("exact-exp", exact);
        row.add("entangled", long(qmath::is_entangled_2q(state) ? 1 : 0));
        row.add("violating", long(exact > 2.0 ? 1 : 0));
        output.rows.push_back(std::move(row));
      }
      break;
    }
  }

  write_results(path, resolved.to_json(), columns, output.rows);
  output.files_written.push_back(path);
  return output;
}

ParsedResults parse_results_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "# loccsim-results v1")
    throw IoError("results file: bad header line");
  if (!std::getline(in, line) || line.rfind("# config ", 0) != 0)
    throw IoError("results file: missing config echo");
  ParsedResults parsed;
  try {
    parsed.config = json::parse(line.substr(9));
  } catch (const json::exception& e) {
    throw IoError(std::string("results file: bad config json: ") + e.what());
  }
  if (!std::getline(in, line)) throw IoError("results file: missing columns");
  parsed.column_names = split(line, '\t');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> vals = split(line, '\t');
    if (vals.size() != parsed.column_names.size())
      throw IoError("results file: row width does not match columns");
    ResultRow row;
    for (std::size_t i = 0; i < vals.size(); ++i)
      row.add(parsed.column_names[i], vals[i]);
    parsed.rows.push_back(std::move(row));
  }
  return parsed;
}

}  // namespace locc::experiment
