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
#include <utility>
#include <vector>

#include "locc/channels.hpp"
#include "locc/qmath.hpp"
#include "locc/rng.hpp"

namespace locc::games {

using qmath::ComplexMatrix;
using qmath::DensityMatrix;

// Binary observable cos(angle) Z + sin(angle) X; eigenvalues are +1 and -1.
class DichotomicObservable {
 public:
  explicit DichotomicObservable(double angle);

  double angle() const { return angle_; }
  const ComplexMatrix& matrix() const { return mat_; }
  // Projector onto the +1 or -1 eigenspace; outcome must be +1 or -1.
  ComplexMatrix projector(int outcome) const;

 private:
  double angle_;
  ComplexMatrix mat_;
};

// Measurement angles for both parties; index 1 and 2 select the column.
struct Settings {
  std::array<double, 2> angles_a{};
  std::array<double, 2> angles_b{};

  static Settings canonical();
  DichotomicObservable observable_a(int index) const;
  DichotomicObservable observable_b(int index) const;
};

// Joint outcome law for one setting pair, in the fixed outcome order
// (+1,+1), (+1,-1), (-1,+1), (-1,-1).
struct JointDistribution {
  std::array<double, 4> p{};

  double prob(int x, int y) const;
  double marginal_a(int x) const;
  double marginal_b(int y) const;
  // Expectation of the product of outcomes.
  double correlation() const { return p[0] - p[1] - p[2] + p[3]; }
};

JointDistribution joint_outcome_distribution(const DensityMatrix& state,
                                             const DichotomicObservable& a,
                                             const DichotomicObservable& b);

// Expectation of the outcome product Tr[rho (A x B)].
double exact_correlation(const DensityMatrix& state,
                         const DichotomicObservable& a,
                         const DichotomicObservable& b);

// One measurement round on a fresh copy of the state; returns (x, y) with
// outcomes in {+1, -1}. Consumes exactly one draw from the stream.
std::pair<int, int> sample_round(const DensityMatrix& state,
                                 const DichotomicObservable& a,
                                 const DichotomicObservable& b,
                                 RngStream& rng);

struct ChshEstimate {
  double exp = 0.0;
  double std_err = 0.0;
  // Rounds observed per setting pair, order (1,1), (1,2), (2,1), (2,2).
  std::array<long, 4> counts_per_pair{};
  // Sample mean of the outcome product per setting pair, same order.
  std::array<double, 4> per_pair_means{};
};

// Samples rounds_per_pair rounds for each of the four setting pairs and
// returns the empirical combination |m11 + m12 + m21 - m22| with its
// standard error. Sampling follows the fixed substream scheme, so the
// result is identical for any thread count.
ChshEstimate estimate_chsh(const DensityMatrix& state, const Settings& settings,
                           long rounds_per_pair, std::uint64_t seed,
                           int threads = 1);

// Analytic value |E11 + E12 + E21 - E22| for the given state and settings.
double exact_chsh(const DensityMatrix& state, const Settings& settings);

// Deterministic local strategies assign fixed answers (a1, a2, b1, b2).
struct ClassicalSearchResult {
  double value = 0.0;
  std::vector<std::array<int, 4>> maximizers;
};

// Brute force over all 16 deterministic strategies.
ClassicalSearchResult classical_strategy_search();
double classical_strategy_max();

// Combination value of one deterministic strategy.
double classical_strategy_value(const std::array<int, 4>& answers);

// Mean outcome products per setting pair as they enter the estimator; used
// to turn outcome tallies into an estimate.
ChshEstimate combine_pair_tallies(const std::array<std::array<long, 4>, 4>& tallies);

}  // namespace locc::games
