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

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

#include "locc/errors.hpp"

namespace locc {

// Rounds per sampling work unit. Substreams are derived per unit, so any
// thread count replays the identical sample sequence.
inline constexpr long kSampleBlockSize = 65536;

// Runs fn(unit) for unit in [0, n_units). Units must write only to their own
// output slots; results then cannot depend on scheduling.
inline void run_units(long n_units, int threads,
                      const std::function<void(long)>& fn) {
  if (threads < 1) throw DomainError("thread count must be >= 1");
  if (threads == 1 || n_units <= 1) {
    for (long u = 0; u < n_units; ++u) fn(u);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    for (;;) {
      const long u = next.fetch_add(1);
      if (u >= n_units) return;
      fn(u);
    }
  };
  std::vector<std::thread> pool;
  const int n = int(std::min<long>(threads, n_units));
  pool.reserve(size_t(n));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace locc
