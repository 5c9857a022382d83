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

#include "locc/protocol.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "locc/parallel.hpp"
#include "locc/rng.hpp"

namespace locc::protocol {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kMinExpectedCount = 5.0;

std::string format_angle(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_label(const std::string& label) {
  if (label.empty()) throw DomainError("machine label must be nonempty");
  for (char c : label)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
      throw DomainError("machine label must not contain whitespace");
}

// Answer law of one setting pair along both wirings.
struct PairLaw {
  double marg_a[2] = {0, 0};     // P(x = +1), P(x = -1)
  double cond_b[2][2] = {{0, 0}, {0, 0}};  // P(y | x), rows indexed by x
  double joint[4] = {0, 0, 0, 0};          // (+,+), (+,-), (-,+), (-,-)
};

// Separable path: A's marginal from the reduced state, then B's conditional
// from the post-measurement state on B's side.
void fill_separable_law(const DensityMatrix& pair_state,
                        const games::DichotomicObservable& a,
                        const games::DichotomicObservable& b, PairLaw* law) {
  const DensityMatrix rho_a =
      qmath::partial_trace(pair_state, {2, 2}, qmath::Side::Right);
  const qmath::ComplexMatrix eye = qmath::ComplexMatrix::Identity(2, 2);
  for (int ix = 0; ix < 2; ++ix) {
    const int x = ix == 0 ? 1 : -1;
    const qmath::ComplexMatrix pa = a.projector(x);
    double px = (rho_a.matrix() * pa).trace().real();
    if (px < -1e-12) throw StateError("negative marginal probability");
    if (px < 0.0) px = 0.0;
    law->marg_a[ix] = px;
    const qmath::ComplexMatrix sandwich = qmath::kron(pa, eye);
    const qmath::ComplexMatrix post = qmath::partial_trace_raw(
        sandwich * pair_state.matrix() * sandwich, 2, 2, qmath::Side::Left);
    for (int iy = 0; iy < 2; ++iy) {
      const int y = iy == 0 ? 1 : -1;
      double v = (post * b.projector(y)).trace().real();
      if (v < 0.0) v = 0.0;
      law->cond_b[ix][iy] = px > 1e-15 ? v / px : 0.0;
    }
  }
}

// Monolithic path on the bare pair: one joint Born-rule table.
void fill_monolithic_law(const DensityMatrix& pair_state,
                         const games::DichotomicObservable& a,
                         const games::DichotomicObservable& b, PairLaw* law) {
  const games::JointDistribution dist =
      games::joint_outcome_distribution(pair_state, a, b);
  for (int o = 0; o < 4; ++o) law->joint[o] = dist.p[size_t(o)];
}

// Monolithic path through a purification: the machine holds a four-qubit
// pure state whose pair factor reduces to the shared state, the switch acts
// on the pair factor, and both answers come from one projective measurement
// of that factor.
struct PurifiedMachine {
  qmath::ComplexMatrix global;  // 16 x 16
};

PurifiedMachine purify(const DensityMatrix& shared,
                       const DecoherenceSwitch& decohere) {
  Eigen::SelfAdjointEigenSolver<qmath::ComplexMatrix> es(shared.matrix());
  qmath::ComplexVector psi = qmath::ComplexVector::Zero(16);
  for (int i = 0; i < 4; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam <= 0.0) continue;
    const double root = std::sqrt(lam);
    for (int a = 0; a < 4; ++a) psi(a * 4 + i) += root * es.eigenvectors()(a, i);
  }
  psi /= psi.norm();
  qmath::ComplexMatrix global = psi * psi.adjoint();
  if (decohere.on) {
    const auto ch = decohere.channel(2);
    const qmath::ComplexMatrix eye4 = qmath::ComplexMatrix::Identity(4, 4);
    qmath::ComplexMatrix out = qmath::ComplexMatrix::Zero(16, 16);
    for (const auto& k : ch.kraus()) {
      const qmath::ComplexMatrix kg = qmath::kron(k, eye4);
      out += kg * global * kg.adjoint();
    }
    global = std::move(out);
  }
  return {std::move(global)};
}

void fill_purified_law(const PurifiedMachine& machine,
                       const games::DichotomicObservable& a,
                       const games::DichotomicObservable& b, PairLaw* law) {
  const qmath::ComplexMatrix eye4 = qmath::ComplexMatrix::Identity(4, 4);
  for (int ix = 0; ix < 2; ++ix) {
    for (int iy = 0; iy < 2; ++iy) {
      const qmath::ComplexMatrix op = qmath::kron(
          qmath::kron(a.projector(ix == 0 ? 1 : -1), b.projector(iy == 0 ? 1 : -1)),
          eye4);
      double v = (machine.global * op).trace().real();
      if (v < 0.0) v = 0.0;
      law->joint[2 * ix + iy] = v;
    }
  }
}

std::array<PairLaw, 4> build_laws(const MachineSpec& machine,
                                  const DecoherenceSwitch& decohere,
                                  const games::Settings& settings) {
  std::array<PairLaw, 4> laws;
  if (!machine.quantum()) return laws;
  const DensityMatrix eff = decohere.applied_to(machine.shared_state());
  PurifiedMachine purified{qmath::ComplexMatrix()};
  const bool use_purified =
      machine.kind() == MachineKind::Monolithic && machine.purified();
  if (use_purified) purified = purify(machine.shared_state(), decohere);
  for (int pair = 0; pair < 4; ++pair) {
    const auto a = settings.observable_a(pair / 2 + 1);
    const auto b = settings.observable_b(pair % 2 + 1);
    fill_separable_law(eff, a, b, &laws[size_t(pair)]);
    if (use_purified)
      fill_purified_law(purified, a, b, &laws[size_t(pair)]);
    else
      fill_monolithic_law(eff, a, b, &laws[size_t(pair)]);
  }
  return laws;
}

}  // namespace

MachineSpec::MachineSpec(MachineKind kind, DensityMatrix state, bool purify,
                         std::vector<WeightedStrategy> table, std::string label)
    : kind_(kind),
      shared_(std::move(state)),
      purify_(purify),
      table_(std::move(table)),
      label_(std::move(label)) {}

MachineSpec MachineSpec::separable_provers(DensityMatrix shared,
                                           std::string label) {
  check_label(label);
  if (shared.dim() != 4)
    throw DimensionError("separable provers share a two-qubit state");
  return MachineSpec(MachineKind::SeparableProvers, std::move(shared), false,
                     {}, std::move(label));
}

MachineSpec MachineSpec::monolithic(DensityMatrix shared, bool purify_global,
                                    std::string label) {
  check_label(label);
  if (shared.dim() != 4)
    throw DimensionError("monolithic machine holds a two-qubit state");
  return MachineSpec(MachineKind::Monolithic, std::move(shared), purify_global,
                     {}, std::move(label));
}

MachineSpec MachineSpec::classical(std::vector<WeightedStrategy> table,
                                   std::string label) {
  check_label(label);
  if (table.empty()) throw DomainError("classical machine needs a strategy");
  double sum = 0.0;
  for (const auto& s : table) {
    if (!(s.weight >= 0.0)) throw DomainError("strategy weights must be >= 0");
    for (int v : s.answers)
      if (v != 1 && v != -1) throw DomainError("answers must be +1 or -1");
    sum += s.weight;
  }
  if (std::abs(sum - 1.0) > kWeightTol)
    throw DomainError("strategy weights must sum to one");
  return MachineSpec(MachineKind::ClassicalCorrelated,
                     DensityMatrix::maximally_mixed(4), false, std::move(table),
                     std::move(label));
}

const DensityMatrix& MachineSpec::shared_state() const {
  if (!quantum()) throw DomainError("classical machine has no shared state");
  return shared_;
}

const std::vector<WeightedStrategy>& MachineSpec::strategies() const {
  if (quantum()) throw DomainError("quantum machine has no strategy table");
  return table_;
}

Transcript run_protocol(const MachineSpec& machine,
                        const DecoherenceSwitch& decohere,
                        const games::Settings& settings, long rounds_per_pair,
                        std::uint64_t seed, int threads) {
  if (rounds_per_pair < 1) throw DomainError("rounds_per_pair must be >= 1");
  if (decohere.on && !(decohere.strength >= 0.0 && decohere.strength <= 1.0))
    throw DomainError("switch strength must lie in [0, 1]");
  const std::array<PairLaw, 4> laws = build_laws(machine, decohere, settings);
  std::vector<double> weights;
  if (!machine.quantum())
    for (const auto& s : machine.strategies()) weights.push_back(s.weight);

  // Outcome codes per setting pair: 0..3 for (+,+), (+,-), (-,+), (-,-).
  std::array<std::vector<std::uint8_t>, 4> codes;
  for (auto& c : codes) c.resize(size_t(rounds_per_pair));
  const long blocks =
      (rounds_per_pair + kSampleBlockSize - 1) / kSampleBlockSize;
  run_units(4 * blocks, threads, [&](long u) {
    const int pair = int(u / blocks);
    const long block = u % blocks;
    const long begin = block * kSampleBlockSize;
    const long count = std::min(kSampleBlockSize, rounds_per_pair - begin);
    RngStream rng =
        RngStream::derived(seed, std::uint64_t(pair), std::uint64_t(block));
    std::uint8_t* out = codes[size_t(pair)].data() + begin;
    const PairLaw& law = laws[size_t(pair)];
    switch (machine.kind()) {
      case MachineKind::SeparableProvers:
        // Two local draws per round: A answers from its marginal, B from
        // the conditional law given A's answer.
        for (long r = 0; r < count; ++r) {
          const int ix = rng.sample_index(law.marg_a, 2);
          const int iy = rng.sample_index(law.cond_b[ix], 2);
          out[r] = std::uint8_t(2 * ix + iy);
        }
        break;
      case MachineKind::Monolithic:
        for (long r = 0; r < count; ++r)
          out[r] = std::uint8_t(rng.sample_index(law.joint, 4));
        break;
      case MachineKind::ClassicalCorrelated: {
        const int qa = pair / 2;  // 0-based question indices
        const int qb = pair % 2;
        const auto& table = machine.strategies();
        for (long r = 0; r < count; ++r) {
          const int s = rng.sample_index(weights.data(), int(weights.size()));
          const auto& ans = table[size_t(s)].answers;
          const int ix = ans[size_t(qa)] == 1 ? 0 : 1;
          const int iy = ans[size_t(2 + qb)] == 1 ? 0 : 1;
          out[r] = std::uint8_t(2 * ix + iy);
        }
        break;
      }
    }
  });

  Transcript t;
  t.machine_label = machine.label();
  t.master_seed = seed;
  t.settings = settings;
  t.decohere_on = decohere.on;
  t.decohere_strength = decohere.strength;
  t.rounds.resize(size_t(4 * rounds_per_pair));
  for (long r = 0; r < 4 * rounds_per_pair; ++r) {
    const int pair = int(r % 4);
    const std::uint8_t code = codes[size_t(pair)][size_t(r / 4)];
    RoundRecord& rec = t.rounds[size_t(r)];
    rec.round_index = r;
    rec.question_a = pair / 2 + 1;
    rec.question_b = pair % 2 + 1;
    rec.answer_a = code < 2 ? 1 : -1;
    rec.answer_b = (code % 2) == 0 ? 1 : -1;
    rec.decohere_on = decohere.on;
  }
  return t;
}

double marginal_equivalence_check(const MachineSpec& machine,
                                  const games::Settings& settings) {
  if (!machine.quantum())
    throw DomainError(
        "marginal_equivalence_check applies to quantum machine kinds");
  const DecoherenceSwitch off{};
  const std::array<PairLaw, 4> laws = build_laws(machine, off, settings);
  double worst = 0.0;
  for (const PairLaw& law : laws) {
    for (int ix = 0; ix < 2; ++ix) {
      for (int iy = 0; iy < 2; ++iy) {
        const double sep = law.marg_a[ix] * law.cond_b[ix][iy];
        const double mono = law.joint[2 * ix + iy];
        worst = std::max(worst, std::abs(sep - mono));
      }
    }
  }
  return worst;
}

void Transcript::save(std::ostream& out) const {
  out << "# loccsim transcript v1\n";
  out << "machine " << machine_label << '\n';
  out << "seed " << master_seed << '\n';
  out << "rounds " << rounds.size() << '\n';
  out << "angles-a " << format_angle(settings.angles_a[0]) << ' '
      << format_angle(settings.angles_a[1]) << '\n';
  out << "angles-b " << format_angle(settings.angles_b[0]) << ' '
      << format_angle(settings.angles_b[1]) << '\n';
  out << "switch " << (decohere_on ? 1 : 0) << ' '
      << format_angle(decohere_strength) << '\n';
  for (const RoundRecord& r : rounds) {
    out << r.round_index << ' ' << r.question_a << ' ' << r.question_b << ' '
        << r.answer_a << ' ' << r.answer_b << ' ' << (r.decohere_on ? 1 : 0)
        << '\n';
  }
}

void Transcript::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

Transcript Transcript::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# loccsim transcript v1")
    throw IoError("transcript: bad header line");
  Transcript t;
  std::size_t n_rounds = 0;
  auto expect_key = [&](const char* key) -> std::istringstream {
    if (!std::getline(in, line))
      throw IoError(std::string("transcript: missing ") + key);
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key)
      throw IoError(std::string("transcript: expected ") + key + ", got " + k);
    return ls;
  };
  {
    auto ls = expect_key("machine");
    if (!(ls >> t.machine_label)) throw IoError("transcript: bad machine");
  }
  {
    auto ls = expect_key("seed");
    if (!(ls >> t.master_seed)) throw IoError("transcript: bad seed");
  }
  {
    auto ls = expect_key("rounds");
    if (!(ls >> n_rounds)) throw IoError("transcript: bad round count");
  }
  {
    auto ls = expect_key("angles-a");
    if (!(ls >> t.settings.angles_a[0] >> t.settings.angles_a[1]))
      throw IoError("transcript: bad angles-a");
  }
  {
    auto ls = expect_key("angles-b");
    if (!(ls >> t.settings.angles_b[0] >> t.settings.angles_b[1]))
      throw IoError("transcript: bad angles-b");
  }
  {
    auto ls = expect_key("switch");
    int flag = 0;
    if (!(ls >> flag >> t.decohere_strength) || (flag != 0 && flag != 1))
      throw IoError("transcript: bad switch line");
    t.decohere_on = flag == 1;
  }
  t.rounds.reserve(n_rounds);
  for (std::size_t i = 0; i < n_rounds; ++i) {
    if (!std::getline(in, line)) throw IoError("transcript: truncated rounds");
    std::istringstream ls(line);
    RoundRecord r;
    int flag = 0;
    if (!(ls >> r.round_index >> r.question_a >> r.question_b >> r.answer_a >>
          r.answer_b >> flag))
      throw IoError("transcript: bad round line");
    if (r.round_index != long(i))
      throw IoError("transcript: round indices out of order");
    if ((r.question_a != 1 && r.question_a != 2) ||
        (r.question_b != 1 && r.question_b != 2))
      throw IoError("transcript: question out of range");
    if ((r.answer_a != 1 && r.answer_a != -1) ||
        (r.answer_b != 1 && r.answer_b != -1))
      throw IoError("transcript: answer out of range");
    if ((flag != 0 && flag != 1) || (flag == 1) != t.decohere_on)
      throw IoError("transcript: switch flag differs from header");
    r.decohere_on = flag == 1;
    t.rounds.push_back(r);
  }
  return t;
}

Transcript Transcript::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return load(in);
}

games::ChshEstimate chsh_from_transcript(const Transcript& t) {
  std::array<std::array<long, 4>, 4> tallies{};
  for (const RoundRecord& r : t.rounds) {
    const int pair = (r.question_a - 1) * 2 + (r.question_b - 1);
    const int code = (r.answer_a == 1 ? 0 : 2) + (r.answer_b == 1 ? 0 : 1);
    ++tallies[size_t(pair)][size_t(code)];
  }
  return games::combine_pair_tallies(tallies);
}

DiscriminationVerdict discriminate(const Transcript& t1, const Transcript& t2,
                                   double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("alpha must lie in (0, 1)");
  if (t1.settings.angles_a != t2.settings.angles_a ||
      t1.settings.angles_b != t2.settings.angles_b)
    throw TranscriptMismatchError("transcripts use different settings");
  if (t1.decohere_on != t2.decohere_on ||
      (t1.decohere_on && t1.decohere_strength != t2.decohere_strength))
    throw TranscriptMismatchError("transcripts use different switch schedules");
  std::array<std::array<long, 4>, 4> c1{}, c2{};
  for (const RoundRecord& r : t1.rounds)
    ++c1[size_t((r.question_a - 1) * 2 + r.question_b - 1)]
        [size_t((r.answer_a == 1 ? 0 : 2) + (r.answer_b == 1 ? 0 : 1))];
  for (const RoundRecord& r : t2.rounds)
    ++c2[size_t((r.question_a - 1) * 2 + r.question_b - 1)]
        [size_t((r.answer_a == 1 ? 0 : 2) + (r.answer_b == 1 ? 0 : 1))];

  DiscriminationVerdict verdict;
  verdict.alpha = alpha;
  for (int pair = 0; pair < 4; ++pair) {
    // Category list for this pair; merged in place until every expected
    // count clears the threshold.
    std::vector<std::array<long, 2>> cats;
    for (int o = 0; o < 4; ++o)
      cats.push_back({c1[size_t(pair)][size_t(o)], c2[size_t(pair)][size_t(o)]});
    const double n1 = double(c1[size_t(pair)][0] + c1[size_t(pair)][1] +
                             c1[size_t(pair)][2] + c1[size_t(pair)][3]);
    const double n2 = double(c2[size_t(pair)][0] + c2[size_t(pair)][1] +
                             c2[size_t(pair)][2] + c2[size_t(pair)][3]);
    if (n1 == 0.0 || n2 == 0.0) continue;
    const double total = n1 + n2;
    auto deficient = [&]() {
      for (const auto& c : cats) {
        const double col = double(c[0] + c[1]);
        if (col * n1 / total < kMinExpectedCount ||
            col * n2 / total < kMinExpectedCount)
          return true;
      }
      return false;
    };
    while (cats.size() > 1 && deficient()) {
      // Merge the two categories with the smallest column totals.
      std::size_t lo = 0, lo2 = 1;
      auto col = [&](std::size_t i) { return cats[i][0] + cats[i][1]; };
      if (col(lo2) < col(lo)) std::swap(lo, lo2);
      for (std::size_t i = 2; i < cats.size(); ++i) {
        if (col(i) < col(lo)) {
          lo2 = lo;
          lo = i;
        } else if (col(i) < col(lo2)) {
          lo2 = i;
        }
      }
      cats[lo][0] += cats[lo2][0];
      cats[lo][1] += cats[lo2][1];
      cats.erase(cats.begin() + long(lo2));
    }
    if (cats.size() < 2) continue;
    for (const auto& c : cats) {
      const double col = double(c[0] + c[1]);
      const double e1 = col * n1 / total;
      const double e2 = col * n2 / total;
      if (e1 > 0.0) verdict.chi_square += (double(c[0]) - e1) * (double(c[0]) - e1) / e1;
      if (e2 > 0.0) verdict.chi_square += (double(c[1]) - e2) * (double(c[1]) - e2) / e2;
    }
    verdict.degrees_of_freedom += long(cats.size()) - 1;
  }
  if (verdict.degrees_of_freedom == 0) {
    verdict.p_value = 1.0;
  } else {
    boost::math::chi_squared_distribution<double> dist(
        double(verdict.degrees_of_freedom));
    verdict.p_value = boost::math::cdf(boost::math::complement(dist, verdict.chi_square));
  }
  verdict.decision = verdict.p_value < alpha ? Decision::Distinguished
                                             : Decision::Indistinguishable;
  return verdict;
}

SeparabilityClaim verifier_separability_claim(const Transcript& t) {
  const games::ChshEstimate est = chsh_from_transcript(t);
  if (est.exp - 5.0 * est.std_err > games::classical_strategy_max())
    return SeparabilityClaim::ChannelCertified;
  return SeparabilityClaim::CannotCertify;
}

}  // namespace locc::protocol
