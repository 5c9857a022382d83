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

// Seven end-to-end checks, one PASS or FAIL line each. The process exits
// with the number of failing checks. Each check carries its own wall-clock
// budget; overrunning it fails the check even if the math came out right.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "locc/channels.hpp"
#include "locc/ctc.hpp"
#include "locc/errors.hpp"
#include "locc/experiment.hpp"
#include "locc/games.hpp"
#include "locc/protocol.hpp"
#include "locc/qmath.hpp"
#include "locc/rng.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using locc::RngStream;
using locc::qmath::ComplexMatrix;
using locc::qmath::DensityMatrix;

constexpr double kTsirelson = 2.8284271247461903;
constexpr double kLn2 = 0.69314718055994531;

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return int(std::clamp(hw, 1u, 8u));
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  // Records the first failing condition; later notes still append.
  void require(bool condition, const std::string& label) {
    if (!condition && ok) {
      ok = false;
      detail.str("");
      detail << label;
    }
  }
  void note(const std::string& text) {
    if (ok) {
      if (!detail.str().empty()) detail << "; ";
      detail << text;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// 1. Bell pair at the canonical angles reaches the quantum ceiling.
void check_tsirelson(Check* c) {
  const auto bell = locc::qmath::bell_phi_plus().density();
  const auto settings = locc::games::Settings::canonical();
  const auto est = locc::games::estimate_chsh(bell, settings, 100000,
                                              20260821, worker_threads());
  const double exact = locc::games::exact_chsh(bell, settings);
  c->require(std::abs(exact - kTsirelson) <= 1e-12,
             "analytic combination is off the known ceiling: " +
                 locc::experiment::format_double(exact));
  c->require(std::abs(est.exp - kTsirelson) <= 5.0 * est.std_err,
             "estimate " + fmt(est.exp) + " more than five errors (" +
                 fmt(est.std_err) + ") from the ceiling");
  c->note("estimate " + fmt(est.exp) + " +- " + fmt(est.std_err) +
          ", analytic " + fmt(exact));
}

// 2. The decohered run obeys the classical bound, which brute force pins at 2.
void check_classical_bound(Check* c) {
  const auto machine = locc::protocol::MachineSpec::separable_provers(
      locc::qmath::bell_phi_plus().density());
  const locc::channels::DecoherenceSwitch sw{true, 1.0};
  const auto t =
      locc::protocol::run_protocol(machine, sw, locc::games::Settings::canonical(),
                                   100000, 20260822, worker_threads());
  const auto est = locc::protocol::chsh_from_transcript(t);
  c->require(est.exp <= 2.0 + 5.0 * est.std_err,
             "decohered estimate " + fmt(est.exp) +
                 " clears the classical bound");
  const auto search = locc::games::classical_strategy_search();
  c->require(search.value == 2.0, "strategy enumeration found maximum " +
                                      fmt(search.value) + " instead of 2");
  c->note("decohered estimate " + fmt(est.exp) + " +- " + fmt(est.std_err) +
          ", strategy maximum exactly 2");
}

// 3. The 0.01-grid sweep flags entangled-but-not-violating exactly between
// the two analytic thresholds.
void check_werner_window(Check* c) {
  const fs::path dir = fs::temp_directory_path() / "locc_acceptance_sweep";
  fs::remove_all(dir);
  fs::create_directories(dir);
  locc::experiment::ExperimentConfig config;
  config.experiment = locc::experiment::ExperimentKind::Sweep;
  config.seed = 1;
  config.state = "werner";
  config.sweep_param = "werner-p";
  for (int i = 0; i <= 100; ++i) config.sweep_values.push_back(0.01 * i);
  config.out = (dir / "werner.tsv").string();
  locc::experiment::run(config);
  const auto parsed = locc::experiment::parse_results_file(config.out);
  c->require(parsed.rows.size() == 101, "sweep did not produce 101 rows");
  int first_flagged = -1, last_flagged = -1;
  for (int i = 0; i < int(parsed.rows.size()); ++i) {
    const auto& row = parsed.rows[size_t(i)];
    const double p = 0.01 * i;
    const bool entangled = row.at("entangled") == "1";
    const bool violating = row.at("violating") == "1";
    const bool flagged = entangled && !violating;
    const bool want = p > 1.0 / 3.0 && kTsirelson * p <= 2.0;
    if (flagged && first_flagged < 0) first_flagged = i;
    if (flagged) last_flagged = i;
    c->require(flagged == want,
               "row p = " + fmt(p) + " flagged " + (flagged ? "1" : "0") +
                   ", expected " + (want ? "1" : "0"));
  }
  c->note("ambiguous window on the grid: p in [" + fmt(0.01 * first_flagged) +
          ", " + fmt(0.01 * last_flagged) + "]");
  fs::remove_all(dir);
}

// 4. The separable and monolithic wirings have one answer law, and the
// transcript test cannot tell them apart beyond its false-positive rate.
void check_indistinguishability(Check* c) {
  RngStream rng(20260823);
  const auto settings_canonical = locc::games::Settings::canonical();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rho = testsupport::random_density(rng, 4);
    locc::games::Settings s;
    s.angles_a = {testsupport::random_angle(rng), testsupport::random_angle(rng)};
    s.angles_b = {testsupport::random_angle(rng), testsupport::random_angle(rng)};
    const auto machine =
        i % 2 == 0 ? locc::protocol::MachineSpec::separable_provers(rho)
                   : locc::protocol::MachineSpec::monolithic(rho, i % 4 == 1);
    worst = std::max(worst, locc::protocol::marginal_equivalence_check(machine, s));
  }
  c->require(worst <= 1e-12,
             "answer laws differ by " + fmt(worst) + " across the wirings");

  const auto bell = locc::qmath::bell_phi_plus().density();
  const auto sep = locc::protocol::MachineSpec::separable_provers(bell);
  const auto mono = locc::protocol::MachineSpec::monolithic(bell);
  const locc::channels::DecoherenceSwitch off{};
  const int threads = worker_threads();
  int rejections = 0;
  for (int i = 0; i < 100; ++i) {
    const auto t1 = locc::protocol::run_protocol(
        sep, off, settings_canonical, 100000, 100000 + std::uint64_t(i), threads);
    const auto t2 = locc::protocol::run_protocol(
        mono, off, settings_canonical, 100000, 200000 + std::uint64_t(i), threads);
    const auto verdict = locc::protocol::discriminate(t1, t2, 0.01);
    if (verdict.decision == locc::protocol::Decision::Distinguished)
      ++rejections;
  }
  c->require(rejections <= 5,
             "test separated the wirings in " + std::to_string(rejections) +
                 " of 100 paired runs");
  c->note("law gap " + fmt(worst) + ", " + std::to_string(rejections) +
          " of 100 runs rejected at alpha 0.01");
}

// 5. Causal-consistency fixed points: the known loops and a random family.
void check_fixed_points(Check* c) {
  using locc::ctc::CtcCircuit;
  using locc::ctc::solve_fixed_point;

  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto grandfather = CtcCircuit::make(1, 2, x);
  const auto scalar = DensityMatrix::make(ComplexMatrix::Identity(1, 1));
  const auto gf = solve_fixed_point(grandfather, scalar);
  const ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
  c->require(testsupport::max_abs_diff(gf.rho.matrix(), half) <= 1e-12 &&
                 gf.residual <= 1e-12,
             "bit-flip loop missed the maximally mixed state (residual " +
                 fmt(gf.residual) + ")");

  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  RngStream rng(20260824);
  const auto relay_in = testsupport::random_density(rng, 2);
  const auto relay = solve_fixed_point(CtcCircuit::make(2, 2, swap), relay_in);
  c->require(testsupport::max_abs_diff(relay.rho.matrix(), relay_in.matrix()) <=
                 1e-8,
             "swap loop did not relay its input");

  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  ComplexMatrix one = ComplexMatrix::Zero(2, 2);
  one(1, 1) = 1.0;
  const auto cnot_circuit = CtcCircuit::make(2, 2, cnot);
  const auto driven = solve_fixed_point(cnot_circuit, DensityMatrix::make(one));
  const auto out = locc::ctc::circuit_output(cnot_circuit,
                                             DensityMatrix::make(one), driven);
  c->require(testsupport::max_abs_diff(driven.rho.matrix(), half) <= 1e-12 &&
                 testsupport::max_abs_diff(out.matrix(), one) <= 1e-12,
             "controlled flip loop missed its documented outputs");

  double worst_residual = 0.0, worst_gap = 0.0;
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    const long dch = 1 + i % 4;
    const long dtv = 2 + i % 3;
    const ComplexMatrix u = testsupport::random_unitary(rng, dch * dtv);
    const auto circuit = CtcCircuit::make(dch, dtv, u);
    const auto rho_in = testsupport::random_density(rng, dch);
    const auto iter = solve_fixed_point(circuit, rho_in);
    worst_residual = std::max(worst_residual, iter.residual);
    if (iter.fixed_subspace_dim == 1) {
      locc::ctc::SolveOptions eigen_only;
      eigen_only.mode = locc::ctc::SolveOptions::Mode::EigenOnly;
      const auto eigen = solve_fixed_point(circuit, rho_in, eigen_only);
      const double gap =
          0.5 * locc::qmath::trace_norm(iter.rho.matrix() - eigen.rho.matrix());
      worst_gap = std::max(worst_gap, gap);
      ++compared;
    }
  }
  c->require(worst_residual <= 1e-10,
             "a random circuit stalled at residual " + fmt(worst_residual));
  c->require(worst_gap <= 1e-8, "the two solvers disagree by trace distance " +
                                    fmt(worst_gap));
  c->require(compared >= 50, "too few unique-fixed-point instances to compare");
  c->note("worst residual " + fmt(worst_residual) + ", solver gap " +
          fmt(worst_gap) + " over " + std::to_string(compared) + " circuits");
}

// 6. Entropy accounting on the standard states, invariant under rotations.
void check_entropy(Check* c) {
  const auto bell = locc::qmath::bell_phi_plus().density();
  const auto reduced =
      locc::qmath::partial_trace(bell, {2, 2}, locc::qmath::Side::Right);
  const double s_reduced = locc::qmath::von_neumann_entropy(reduced);
  c->require(std::abs(s_reduced - kLn2) <= 1e-12,
             "reduced bell entropy " + fmt(s_reduced));

  const auto ghz = locc::qmath::ghz_state(3).density();
  const double s_ghz = locc::qmath::max_entanglement_entropy(ghz);
  c->require(std::abs(s_ghz - kLn2) <= 1e-12,
             "three-qubit split entropy " + fmt(s_ghz));

  RngStream rng(20260825);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const long dim = i % 2 == 0 ? 4 : 8;
    const auto rho = testsupport::random_density(rng, dim);
    const ComplexMatrix u = testsupport::random_unitary(rng, dim);
    const auto rotated =
        DensityMatrix::make(u * rho.matrix() * u.adjoint());
    worst = std::max(worst, std::abs(locc::qmath::von_neumann_entropy(rotated) -
                                     locc::qmath::von_neumann_entropy(rho)));
  }
  c->require(worst <= 1e-10, "entropy moved " + fmt(worst) + " under rotation");
  c->note("bell and split entropies at ln 2, rotation drift " + fmt(worst));
}

// 7. Every experiment kind re-runs byte-identically, also at full parallelism.
void check_determinism(Check* c) {
  using locc::experiment::ExperimentConfig;
  using locc::experiment::ExperimentKind;
  const fs::path dir = fs::temp_directory_path() / "locc_acceptance_rerun";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto slurp = [](const std::vector<std::string>& paths) {
    std::map<std::string, std::string> got;
    for (const std::string& p : paths) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream body;
      body << in.rdbuf();
      got[fs::path(p).filename().string()] = body.str();
    }
    return got;
  };

  for (ExperimentKind kind :
       {ExperimentKind::Chsh, ExperimentKind::Discriminate, ExperimentKind::Ctc,
        ExperimentKind::Entropy, ExperimentKind::Sweep}) {
    ExperimentConfig config;
    config.experiment = kind;
    config.seed = 20260826;
    config.rounds_per_pair = 20000;
    config.circuit_file =
        std::string(LOCC_SOURCE_DIR) + "/circuits/grandfather.txt";
    config.sweep_values = {0.1, 0.5, 0.9};
    config.out = (dir / (to_key(kind) + ".tsv")).string();

    // Same config run twice must agree byte for byte.
    const auto first = slurp(locc::experiment::run(config).files_written);
    const auto second = slurp(locc::experiment::run(config).files_written);
    c->require(first == second,
               to_key(kind) + " rerun changed some output byte");

    // Full parallelism may only change the echoed thread count itself.
    config.threads = worker_threads();
    const auto parallel = slurp(locc::experiment::run(config).files_written);
    c->require(parallel.size() == first.size(),
               to_key(kind) + " parallel rerun wrote different files");
    for (const auto& [name, content] : first) {
      const auto it = parallel.find(name);
      if (it == parallel.end()) {
        c->require(false, to_key(kind) + " parallel rerun lost " + name);
        continue;
      }
      std::istringstream lhs(content), rhs(it->second);
      std::string l, r;
      while (std::getline(lhs, l)) {
        if (!std::getline(rhs, r)) {
          c->require(false, to_key(kind) + " parallel output truncated");
          break;
        }
        if (l.rfind("# config", 0) == 0 && r.rfind("# config", 0) == 0)
          continue;  // echoes its own thread count by design
        if (l != r) {
          c->require(false,
                     to_key(kind) + " parallel output differs in " + name);
          break;
        }
      }
    }
  }
  c->note("five experiment kinds, identical bytes across reruns and threads");
  fs::remove_all(dir);
}

struct Criterion {
  const char* name;
  double budget_seconds;
  void (*fn)(Check*);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"ceiling saturation at the canonical angles", 10.0, check_tsirelson},
      {"classical bound under full decoherence", 10.0, check_classical_bound},
      {"entangled-but-not-violating window on the 0.01 grid", 5.0,
       check_werner_window},
      {"wirings share one law and defeat the transcript test", 300.0,
       check_indistinguishability},
      {"causal-consistency fixed points", 30.0, check_fixed_points},
      {"entropy accounting", 5.0, check_entropy},
      {"byte-identical reruns at any thread count", 300.0, check_determinism},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.fn(&check);
    } catch (const std::exception& e) {
      check.require(false, std::string("threw: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (seconds > criterion.budget_seconds) {
      check.require(false, "took " + fmt(seconds) + " s, budget " +
                               fmt(criterion.budget_seconds) + " s");
    }
    if (!check.ok) ++failures;
    std::printf("%s: %d. %s (%s) [%.1f s]\n", check.ok ? "PASS" : "FAIL",
                index, criterion.name, check.detail.str().c_str(), seconds);
    std::fflush(stdout);
  }
  return failures;
}
