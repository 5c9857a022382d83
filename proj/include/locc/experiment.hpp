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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "locc/errors.hpp"

namespace locc::experiment {

enum class ExperimentKind { Chsh, Discriminate, Ctc, Entropy, Sweep };

std::string to_key(ExperimentKind kind);
ExperimentKind experiment_kind_from_key(const std::string& key);

// Full description of one run. Serializes to flat JSON with kebab-case keys
// matching the command-line flags; unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Chsh;
  std::optional<std::uint64_t> seed;
  long rounds_per_pair = 100000;
  double alpha = 0.01;
  int threads = 1;

  // State preset: bell, werner, product, ghz, custom.
  std::string state = "bell";
  double werner_p = 0.5;
  int ghz_qubits = 3;
  std::string state_file;

  bool switch_on = false;
  double switch_strength = 1.0;
  std::array<double, 2> angles_a;
  std::array<double, 2> angles_b;

  // Machine presets: separable, monolithic, monolithic-purified, classical.
  std::string machine = "separable";
  std::string machine_a = "separable";
  std::string machine_b = "monolithic";
  // Classical strategy table "w:a1,a2,b1,b2;..."; a bare "a1,a2,b1,b2"
  // entry gets weight one.
  std::string strategy = "1,1,1,-1";

  std::string circuit_file;

  std::string sweep_param = "werner-p";
  std::vector<double> sweep_values;

  // Output file; relative paths land in the output directory (the
  // LOCCSIM_OUT_DIR environment variable, else the working directory).
  std::string out;

  ExperimentConfig();
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// One output record as ordered (column, formatted value) pairs.
struct ResultRow {
  std::vector<std::pair<std::string, std::string>> columns;

  void add(const std::string& name, const std::string& value);
  void add(const std::string& name, double value);
  void add(const std::string& name, long value);
  const std::string& at(const std::string& name) const;
};

struct RunOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> files_written;
  std::uint64_t resolved_seed = 0;
};

// Executes the experiment and writes its output files. Identical configs
// with a set seed produce byte-identical files for any thread count.
RunOutput run(const ExperimentConfig& config);

struct ParsedResults {
  nlohmann::json config;
  std::vector<std::string> column_names;
  std::vector<ResultRow> rows;
};

ParsedResults parse_results_file(const std::string& path);

// Directory for relative output paths: LOCCSIM_OUT_DIR, else ".".
std::string output_directory();

// Formats with 17 significant digits, round-trip safe.
std::string format_double(double value);

}  // namespace locc::experiment
