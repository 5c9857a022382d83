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

#include <cmath>
#include <cstdint>
#include <random>

namespace locc {

// Deterministic random stream with explicit substream derivation.
//
// Sampling helpers below avoid the standard-library distribution objects,
// whose output sequences are implementation-defined; everything here is a
// fixed function of the raw mt19937_64 words, so runs replay bit-for-bit
// across platforms and thread counts.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix(mix(seed) ^ kGolden)) {}

  // Stream for work unit (hi, lo) under a master seed. Units drawing from
  // distinct (hi, lo) pairs may run concurrently; replaying the same triple
  // yields the same sequence regardless of scheduling.
  static RngStream derived(std::uint64_t master, std::uint64_t hi,
                           std::uint64_t lo) {
    std::uint64_t s = mix(master + kGolden * (hi + 1));
    s = mix(s ^ (lo + kGolden));
    return RngStream(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; pairs are cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double t = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // One categorical draw by cumulative walk. The final bucket absorbs any
  // normalization remainder, so slightly imperfect weights stay safe.
  int sample_index(const double* probs, int n) {
    const double u = next_double();
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace locc
