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

#include "locc/games.hpp"

#include <cmath>

#include "locc/parallel.hpp"

namespace locc::games {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kProbTol = 1e-12;

void check_two_qubits(const DensityMatrix& state, const char* who) {
  if (state.dim() != 4)
    throw DimensionError(std::string(who) + " requires a two-qubit state");
}

}  // namespace

DichotomicObservable::DichotomicObservable(double angle) : angle_(angle) {
  if (!std::isfinite(angle)) throw DomainError("observable angle must be finite");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  mat_ = ComplexMatrix(2, 2);
  mat_ << c, s, s, -c;
}

ComplexMatrix DichotomicObservable::projector(int outcome) const {
  if (outcome != 1 && outcome != -1)
    throw DomainError("outcome must be +1 or -1");
  ComplexMatrix p = 0.5 * (ComplexMatrix::Identity(2, 2) + double(outcome) * mat_);
  return p;
}

Settings Settings::canonical() {
  Settings s;
  s.angles_a = {0.0, kPi / 2.0};
  s.angles_b = {kPi / 4.0, -kPi / 4.0};
  return s;
}

DichotomicObservable Settings::observable_a(int index) const {
  if (index != 1 && index != 2) throw DomainError("setting index must be 1 or 2");
  return DichotomicObservable(angles_a[size_t(index - 1)]);
}

DichotomicObservable Settings::observable_b(int index) const {
  if (index != 1 && index != 2) throw DomainError("setting index must be 1 or 2");
  return DichotomicObservable(angles_b[size_t(index - 1)]);
}

double JointDistribution::prob(int x, int y) const {
  if ((x != 1 && x != -1) || (y != 1 && y != -1))
    throw DomainError("outcomes must be +1 or -1");
  return p[size_t((x == 1 ? 0 : 2) + (y == 1 ? 0 : 1))];
}

double JointDistribution::marginal_a(int x) const {
  return prob(x, 1) + prob(x, -1);
}

double JointDistribution::marginal_b(int y) const {
  return prob(1, y) + prob(-1, y);
}

JointDistribution joint_outcome_distribution(const DensityMatrix& state,
                                             const DichotomicObservable& a,
                                             const DichotomicObservable& b) {
  check_two_qubits(state, "joint_outcome_distribution");
  const ComplexMatrix pa[2] = {a.projector(1), a.projector(-1)};
  const ComplexMatrix pb[2] = {b.projector(1), b.projector(-1)};
  JointDistribution dist;
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double v =
          (state.matrix() * qmath::kron(pa[i], pb[j])).trace().real();
      if (v < -kProbTol)
        throw StateError("joint outcome probability below -1e-12");
      const double clipped = v > 0.0 ? v : 0.0;
      dist.p[size_t(2 * i + j)] = clipped;
      sum += clipped;
    }
  }
  if (std::abs(sum - 1.0) > 4.0 * kProbTol)
    throw StateError("joint outcome probabilities do not sum to one");
  return dist;
}

double exact_correlation(const DensityMatrix& state,
                         const DichotomicObservable& a,
                         const DichotomicObservable& b) {
  check_two_qubits(state, "exact_correlation");
  return (state.matrix() * qmath::kron(a.matrix(), b.matrix())).trace().real();
}

std::pair<int, int> sample_round(const DensityMatrix& state,
                                 const DichotomicObservable& a,
                                 const DichotomicObservable& b,
                                 RngStream& rng) {
  const JointDistribution dist = joint_outcome_distribution(state, a, b);
  const int idx = rng.sample_index(dist.p.data(), 4);
  return {idx < 2 ? 1 : -1, (idx % 2) == 0 ? 1 : -1};
}

ChshEstimate combine_pair_tallies(
    const std::array<std::array<long, 4>, 4>& tallies) {
  ChshEstimate est;
  double var_sum = 0.0;
  for (int pair = 0; pair < 4; ++pair) {
    const auto& t = tallies[size_t(pair)];
    const long n = t[0] + t[1] + t[2] + t[3];
    est.counts_per_pair[size_t(pair)] = n;
    if (n == 0) continue;
    const long agree = t[0] + t[3];
    const long disagree = t[1] + t[2];
    const double mean = double(agree - disagree) / double(n);
    est.per_pair_means[size_t(pair)] = mean;
    if (n > 1) {
      // Outcome products are +/-1, so the sample variance collapses to
      // n (1 - mean^2) / (n - 1).
      const double var = double(n) / double(n - 1) * (1.0 - mean * mean);
      var_sum += var / double(n);
    }
  }
  est.exp = std::abs(est.per_pair_means[0] + est.per_pair_means[1] +
                     est.per_pair_means[2] - est.per_pair_means[3]);
  est.std_err = std::sqrt(var_sum);
  return est;
}

ChshEstimate estimate_chsh(const DensityMatrix& state, const Settings& settings,
                           long rounds_per_pair, std::uint64_t seed,
                           int threads) {
  check_two_qubits(state, "estimate_chsh");
  if (rounds_per_pair < 1) throw DomainError("rounds_per_pair must be >= 1");
  JointDistribution dists[4];
  for (int pair = 0; pair < 4; ++pair) {
    dists[pair] = joint_outcome_distribution(
        state, settings.observable_a(pair / 2 + 1),
        settings.observable_b(pair % 2 + 1));
  }
  const long blocks = (rounds_per_pair + kSampleBlockSize - 1) / kSampleBlockSize;
  const long n_units = 4 * blocks;
  std::vector<std::array<long, 4>> unit_tallies(size_t(n_units), {0, 0, 0, 0});
  run_units(n_units, threads, [&](long u) {
    const int pair = int(u / blocks);
    const long block = u % blocks;
    const long begin = block * kSampleBlockSize;
    const long count = std::min(kSampleBlockSize, rounds_per_pair - begin);
    RngStream rng = RngStream::derived(seed, std::uint64_t(pair),
                                       std::uint64_t(block));
    auto& tally = unit_tallies[size_t(u)];
    const double* p = dists[pair].p.data();
    for (long r = 0; r < count; ++r) ++tally[size_t(rng.sample_index(p, 4))];
  });
  std::array<std::array<long, 4>, 4> tallies{};
  for (long u = 0; u < n_units; ++u) {
    const int pair = int(u / blocks);
    for (int o = 0; o < 4; ++o)
      tallies[size_t(pair)][size_t(o)] += unit_tallies[size_t(u)][size_t(o)];
  }
  return combine_pair_tallies(tallies);
}

double exact_chsh(const DensityMatrix& state, const Settings& settings) {
  check_two_qubits(state, "exact_chsh");
  double e[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      e[i][j] = exact_correlation(state, settings.observable_a(i + 1),
                                  settings.observable_b(j + 1));
  return std::abs(e[0][0] + e[0][1] + e[1][0] - e[1][1]);
}

double classical_strategy_value(const std::array<int, 4>& answers) {
  for (int v : answers)
    if (v != 1 && v != -1) throw DomainError("answers must be +1 or -1");
  const double a1 = answers[0], a2 = answers[1];
  const double b1 = answers[2], b2 = answers[3];
  return std::abs(a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2);
}

ClassicalSearchResult classical_strategy_search() {
  ClassicalSearchResult result;
  for (int bits = 0; bits < 16; ++bits) {
    std::array<int, 4> answers;
    for (int k = 0; k < 4; ++k) answers[size_t(k)] = (bits >> k) & 1 ? 1 : -1;
    const double v = classical_strategy_value(answers);
    if (v > result.value + 1e-15) {
      result.value = v;
      result.maximizers.clear();
    }
    if (std::abs(v - result.value) <= 1e-15) result.maximizers.push_back(answers);
  }
  return result;
}

double classical_strategy_max() { return classical_strategy_search().value; }

}  // namespace locc::games
