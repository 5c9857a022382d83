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

#include <cmath>
#include <cstdint>
#include <limits>

#include "doctest.h"
#include "locc/errors.hpp"
#include "locc/games.hpp"
#include "locc/qmath.hpp"
#include "support.hpp"

using locc::DomainError;
using locc::RngStream;
using locc::games::ChshEstimate;
using locc::games::classical_strategy_max;
using locc::games::classical_strategy_search;
using locc::games::classical_strategy_value;
using locc::games::combine_pair_tallies;
using locc::games::DichotomicObservable;
using locc::games::estimate_chsh;
using locc::games::exact_chsh;
using locc::games::exact_correlation;
using locc::games::joint_outcome_distribution;
using locc::games::sample_round;
using locc::games::Settings;
using locc::qmath::ComplexMatrix;
using testsupport::max_abs_diff;
using testsupport::random_angle;

namespace {

constexpr double kTsirelson = 2.8284271247461903;
constexpr double kQuarterPi = 0.78539816339744828;
constexpr double kHalfPi = 1.5707963267948966;

Settings random_settings(RngStream& rng) {
  Settings s;
  s.angles_a = {random_angle(rng), random_angle(rng)};
  s.angles_b = {random_angle(rng), random_angle(rng)};
  return s;
}

}  // namespace

TEST_CASE("observables square to the identity and split into projectors") {
  RngStream rng(501);
  for (int rep = 0; rep < 20; ++rep) {
    const DichotomicObservable o(random_angle(rng));
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    CHECK(max_abs_diff(o.matrix() * o.matrix(), id) <= 1e-14);
    CHECK(max_abs_diff(o.projector(1) + o.projector(-1), id) <= 1e-14);
    CHECK(max_abs_diff(o.matrix() * o.projector(1), o.projector(1)) <= 1e-14);
    CHECK(max_abs_diff(o.matrix() * o.projector(-1), -o.projector(-1)) <= 1e-14);
  }
  CHECK_THROWS_AS(DichotomicObservable(0.0).projector(0), DomainError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(DichotomicObservable{inf}, DomainError);
}

TEST_CASE("canonical settings carry the standard angles") {
  const Settings s = Settings::canonical();
  CHECK(s.angles_a[0] == 0.0);
  CHECK(s.angles_a[1] == kHalfPi);
  CHECK(s.angles_b[0] == kQuarterPi);
  CHECK(s.angles_b[1] == -kQuarterPi);
  CHECK_THROWS_AS(s.observable_a(0), DomainError);
  CHECK_THROWS_AS(s.observable_b(3), DomainError);
}

TEST_CASE("bell correlation follows the cosine of the angle difference") {
  const auto bell = locc::qmath::bell_phi_plus().density();
  RngStream rng(502);
  for (int rep = 0; rep < 100; ++rep) {
    const double ta = random_angle(rng);
    const double tb = random_angle(rng);
    const DichotomicObservable a(ta), b(tb);
    const double want = std::cos(ta - tb);
    CHECK(std::abs(exact_correlation(bell, a, b) - want) <= 1e-12);
    CHECK(std::abs(joint_outcome_distribution(bell, a, b).correlation() - want) <=
          1e-12);
  }
}

TEST_CASE("joint laws are proper distributions with uniform bell marginals") {
  const auto bell = locc::qmath::bell_phi_plus().density();
  RngStream rng(503);
  for (int rep = 0; rep < 50; ++rep) {
    const DichotomicObservable a(random_angle(rng)), b(random_angle(rng));
    const auto dist = joint_outcome_distribution(bell, a, b);
    double sum = 0.0;
    for (double v : dist.p) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(std::abs(dist.marginal_a(1) - 0.5) <= 1e-12);
    CHECK(std::abs(dist.marginal_a(-1) - 0.5) <= 1e-12);
    CHECK(std::abs(dist.marginal_b(1) - 0.5) <= 1e-12);
    CHECK(std::abs(dist.marginal_b(-1) - 0.5) <= 1e-12);
  }
}

TEST_CASE("canonical combination on bell reaches the quantum ceiling") {
  const auto bell = locc::qmath::bell_phi_plus().density();
  CHECK(std::abs(exact_chsh(bell, Settings::canonical()) - kTsirelson) <= 1e-12);
}

TEST_CASE("no two-qubit state beats the quantum ceiling at any angles") {
  RngStream rng(504);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto rho = testsupport::random_density(rng, 4);
    CHECK(exact_chsh(rho, random_settings(rng)) <= kTsirelson + 1e-9);
  }
}

TEST_CASE("product states never beat the classical bound") {
  RngStream rng(505);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto a = testsupport::random_density(rng, 2);
    const auto b = testsupport::random_density(rng, 2);
    const auto prod = locc::qmath::tensor_product(a, b);
    CHECK(exact_chsh(prod, random_settings(rng)) <= 2.0 + 1e-9);
  }
}

TEST_CASE("aligned and opposed measurements on bell are deterministic") {
  const auto bell = locc::qmath::bell_phi_plus().density();
  const DichotomicObservable zero(0.0);
  const DichotomicObservable pi(3.141592653589793238462643383279502884);
  RngStream rng(506);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto [same_a, same_b] = sample_round(bell, zero, zero, rng);
    CHECK(same_a == same_b);
    const auto [opp_a, opp_b] = sample_round(bell, zero, pi, rng);
    CHECK(opp_a == -opp_b);
  }
}

TEST_CASE("estimator lands within five standard errors of the analytic value") {
  const auto bell = locc::qmath::bell_phi_plus().density();
  const Settings settings = Settings::canonical();
  const double exact = exact_chsh(bell, settings);
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const ChshEstimate est = estimate_chsh(bell, settings, 10000, seed);
    CHECK(est.std_err > 0.0);
    for (long c : est.counts_per_pair) CHECK(c == 10000);
    if (std::abs(est.exp - exact) <= 5.0 * est.std_err) ++hits;
  }
  CHECK(hits >= 198);
}

TEST_CASE("estimate is identical for any thread count") {
  const auto state = locc::channels::werner_state(0.7);
  const Settings settings = Settings::canonical();
  const ChshEstimate one = estimate_chsh(state, settings, 200000, 99, 1);
  for (int threads : {2, 4, 8}) {
    const ChshEstimate many = estimate_chsh(state, settings, 200000, 99, threads);
    CHECK(one.exp == many.exp);
    CHECK(one.std_err == many.std_err);
    for (int p = 0; p < 4; ++p) {
      CHECK(one.per_pair_means[p] == many.per_pair_means[p]);
      CHECK(one.counts_per_pair[p] == many.counts_per_pair[p]);
    }
  }
}

TEST_CASE("every deterministic strategy hits the classical bound exactly") {
  // One of b1 + b2 and b1 - b2 is zero and the other has magnitude two, so
  // a1 (b1 + b2) + a2 (b1 - b2) always has magnitude exactly two.
  const auto result = classical_strategy_search();
  CHECK(result.value == 2.0);
  CHECK(result.maximizers.size() == 16);
  for (const auto& s : result.maximizers)
    CHECK(classical_strategy_value(s) == 2.0);
  CHECK(classical_strategy_max() == 2.0);
  CHECK(classical_strategy_value({1, 1, 1, -1}) == 2.0);
  CHECK(classical_strategy_value({-1, 1, -1, 1}) == 2.0);
  CHECK_THROWS_AS(classical_strategy_value({1, 0, 1, 1}), DomainError);
}

TEST_CASE("tally combination reproduces hand-computed moments") {
  // Each pair: 3 + 1 + 1 + 3 outcomes, product mean (6 - 2) / 8 = 0.5,
  // variance of the mean (1 - 0.25) / 7 per pair.
  std::array<std::array<long, 4>, 4> tallies{};
  for (auto& t : tallies) t = {3, 1, 1, 3};
  const ChshEstimate est = combine_pair_tallies(tallies);
  CHECK(std::abs(est.exp - 1.0) <= 1e-15);
  for (int p = 0; p < 4; ++p) {
    CHECK(est.counts_per_pair[p] == 8);
    CHECK(std::abs(est.per_pair_means[p] - 0.5) <= 1e-15);
  }
  CHECK(std::abs(est.std_err - std::sqrt(3.0 / 7.0)) <= 1e-15);
}

TEST_CASE("estimator rejects nonsense round counts and states") {
  const auto bell = locc::qmath::bell_phi_plus().density();
  CHECK_THROWS_AS(estimate_chsh(bell, Settings::canonical(), 0, 1),
                  DomainError);
  RngStream rng(507);
  const auto rho2 = testsupport::random_density(rng, 2);
  CHECK_THROWS_AS(exact_chsh(rho2, Settings::canonical()),
                  locc::DimensionError);
}
