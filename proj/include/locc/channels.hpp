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

#include <vector>

#include "locc/qmath.hpp"

namespace locc::channels {

using qmath::ComplexMatrix;
using qmath::DensityMatrix;

inline constexpr double kTracePreservingTol = 1e-10;

// Completely positive trace-preserving map in Kraus form.
class QuantumChannel {
 public:
  // Validates operator shapes and sum_k K^dag K = I within 1e-10.
  static QuantumChannel make(long dim_in, long dim_out,
                             std::vector<ComplexMatrix> kraus);

  static QuantumChannel identity(long dim);

  long dim_in() const { return dim_in_; }
  long dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  DensityMatrix apply(const DensityMatrix& state) const;
  // Same map on a raw operator, without output validation. Solver hot path.
  ComplexMatrix apply_raw(const ComplexMatrix& m) const;

 private:
  QuantumChannel(long din, long dout, std::vector<ComplexMatrix> ks)
      : dim_in_(din), dim_out_(dout), kraus_(std::move(ks)) {}
  long dim_in_;
  long dim_out_;
  std::vector<ComplexMatrix> kraus_;
};

// Dephasing in the computational basis of an n-qubit register. Off-diagonal
// entries are scaled by exactly (1 - strength); strength 1 removes them.
QuantumChannel dephasing_channel(int n_qubits, double strength);

// p |phi+><phi+| + (1 - p) I/4 on two qubits, p in [0, 1].
DensityMatrix werner_state(double p);

// Verifier-controlled decoherence applied to the shared pair before
// measurement. Off means the channel is the identity.
struct DecoherenceSwitch {
  bool on = false;
  double strength = 1.0;

  QuantumChannel channel(int n_qubits) const;
  DensityMatrix applied_to(const DensityMatrix& state) const;
};

}  // namespace locc::channels
