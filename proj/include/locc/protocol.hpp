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
#include <iosfwd>
#include <string>
#include <vector>

#include "locc/channels.hpp"
#include "locc/games.hpp"
#include "locc/qmath.hpp"

namespace locc::protocol {

using channels::DecoherenceSwitch;
using qmath::DensityMatrix;

// How the answering side is wired internally. The verifier never sees this;
// transcripts carry only an opaque label.
enum class MachineKind {
  // Two isolated provers holding one qubit each of a shared pair. Answers
  // come from local measurements: A's answer depends only on A's question
  // and A's qubit, B's on the conditional state left on B's side.
  SeparableProvers,
  // A single device holding the whole pair (optionally a purification of
  // it) and drawing both answers from the joint outcome law at once.
  Monolithic,
  // Classical shared randomness over deterministic answer strategies.
  ClassicalCorrelated,
};

// One deterministic answer table (a1, a2, b1, b2), entries +1 or -1.
struct WeightedStrategy {
  std::array<int, 4> answers{1, 1, 1, 1};
  double weight = 1.0;
};

class MachineSpec {
 public:
  static MachineSpec separable_provers(DensityMatrix shared,
                                       std::string label = "separable");
  // purify_global embeds the pair into a four-qubit pure state and answers
  // by measuring the pair factor of that global state.
  static MachineSpec monolithic(DensityMatrix shared, bool purify_global = false,
                                std::string label = "monolithic");
  // Weights must be nonnegative and sum to one within 1e-12.
  static MachineSpec classical(std::vector<WeightedStrategy> table,
                               std::string label = "classical");

  MachineKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  bool quantum() const { return kind_ != MachineKind::ClassicalCorrelated; }
  const DensityMatrix& shared_state() const;
  bool purified() const { return purify_; }
  const std::vector<WeightedStrategy>& strategies() const;

 private:
  MachineSpec(MachineKind kind, DensityMatrix state, bool purify,
              std::vector<WeightedStrategy> table, std::string label);
  MachineKind kind_;
  DensityMatrix shared_;
  bool purify_ = false;
  std::vector<WeightedStrategy> table_;
  std::string label_;
};

struct RoundRecord {
  long round_index = 0;
  int question_a = 1;  // 1 or 2
  int question_b = 1;  // 1 or 2
  int answer_a = 1;    // +1 or -1
  int answer_b = 1;    // +1 or -1
  bool decohere_on = false;
};

// Everything the verifier retains from one protocol run.
struct Transcript {
  std::string machine_label;
  std::uint64_t master_seed = 0;
  games::Settings settings;
  bool decohere_on = false;
  double decohere_strength = 1.0;
  std::vector<RoundRecord> rounds;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static Transcript load(std::istream& in);
  static Transcript load_file(const std::string& path);
};

// Runs the question/answer loop: rounds_per_pair rounds for each of the four
// setting pairs, interleaved round-robin. The decoherence switch acts on the
// shared pair before measurement; its setting is constant across the run and
// recorded per round. Identical inputs produce identical transcripts for any
// thread count.
Transcript run_protocol(const MachineSpec& machine,
                        const DecoherenceSwitch& decohere,
                        const games::Settings& settings, long rounds_per_pair,
                        std::uint64_t seed, int threads = 1);

// Largest absolute cell difference between the answer law computed along the
// separable path (A's marginal, then B's conditional) and along the
// monolithic path (one joint draw), over all setting pairs and outcomes.
// Quantum machine kinds only.
double marginal_equivalence_check(const MachineSpec& machine,
                                  const games::Settings& settings);

enum class Decision { Indistinguishable, Distinguished };

struct DiscriminationVerdict {
  double chi_square = 0.0;
  long degrees_of_freedom = 0;
  double p_value = 1.0;
  double alpha = 0.0;
  Decision decision = Decision::Indistinguishable;
};

// Two-sample chi-square homogeneity test on per-setting-pair outcome counts.
// Categories with too-small expected counts are merged before testing. The
// transcripts must share settings and switch schedule.
DiscriminationVerdict discriminate(const Transcript& t1, const Transcript& t2,
                                   double alpha);

// What the verifier may assert about the machine from one transcript.
enum class SeparabilityClaim {
  // Statistics are consistent with classical shared randomness; separable
  // and monolithic quantum wirings also land here, since their transcripts
  // share one law.
  CannotCertify,
  // The estimated combination clears the classical bound by five standard
  // errors: the parties must share quantum correlations.
  ChannelCertified,
};

SeparabilityClaim verifier_separability_claim(const Transcript& t);

// Estimator over a transcript's rounds, grouped by setting pair.
games::ChshEstimate chsh_from_transcript(const Transcript& t);

}  // namespace locc::protocol
