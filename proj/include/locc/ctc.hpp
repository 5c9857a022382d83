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

#include <string>

#include "locc/channels.hpp"
#include "locc/qmath.hpp"

namespace locc::ctc {

using channels::QuantumChannel;
using qmath::ComplexMatrix;
using qmath::DensityMatrix;

// Caps keep the dense solver and its vectorized form tractable.
inline constexpr long kMaxTotalDim = 256;
inline constexpr long kMaxTimeTravelDim = 32;

// A unitary interaction between a chronology-respecting register (the left,
// slow tensor factor) and a time-traveling register (the right, fast one).
class CtcCircuit {
 public:
  // Validates dimensions, the caps above, and unitarity within 1e-10.
  static CtcCircuit make(long dim_ch, long dim_tv, ComplexMatrix unitary);

  long dim_ch() const { return dim_ch_; }
  long dim_tv() const { return dim_tv_; }
  long dim_total() const { return dim_ch_ * dim_tv_; }
  const ComplexMatrix& unitary() const { return unitary_; }

 private:
  CtcCircuit(long dch, long dtv, ComplexMatrix u)
      : dim_ch_(dch), dim_tv_(dtv), unitary_(std::move(u)) {}
  long dim_ch_;
  long dim_tv_;
  ComplexMatrix unitary_;
};

// The map the time-traveling register experiences for a fixed input on the
// chronology-respecting register: rho -> Tr_ch[U (rho_in x rho) U^dag],
// presented in Kraus form.
QuantumChannel induced_map(const CtcCircuit& circuit,
                           const DensityMatrix& rho_in);

enum class FixedPointMethod { CesaroIteration, EigenProjection };

struct FixedPointResult {
  DensityMatrix rho;
  // Trace norm of (map(rho) - rho).
  double residual = 0.0;
  // Multiplicity of eigenvalue one of the induced map (eigenvalues within
  // 1e-8 of one).
  long fixed_subspace_dim = 0;
  FixedPointMethod method = FixedPointMethod::CesaroIteration;
  // Channel applications spent in the iterative phase.
  long iterations = 0;
};

struct SolveOptions {
  double residual_target = 1e-10;
  long iteration_cap = 100000;
  enum class Mode { Auto, IterativeOnly, EigenOnly };
  Mode mode = Mode::Auto;
};

// Self-consistent state of the time-traveling register. Iteration starts
// from the maximally mixed state and averages orbit segments; if that
// stalls, a spectral projection of the vectorized map takes over.
FixedPointResult solve_fixed_point(const CtcCircuit& circuit,
                                   const DensityMatrix& rho_in,
                                   const SolveOptions& options = {});

// State of the chronology-respecting register after the interaction:
// Tr_tv[U (rho_in x rho_fixed) U^dag].
DensityMatrix circuit_output(const CtcCircuit& circuit,
                             const DensityMatrix& rho_in,
                             const FixedPointResult& fixed_point);

struct CircuitFile {
  long dim_ch = 0;
  long dim_tv = 0;
  ComplexMatrix unitary;
  ComplexMatrix rho_in;

  CtcCircuit circuit() const;
  DensityMatrix input_state() const;
};

// Text format: "# loccsim circuit v1", then "dim-ch N", "dim-tv M", a
// "unitary" block of N*M rows with re im pairs, and a "rho-in" block of N
// rows. '#' lines and blank lines are ignored between blocks.
CircuitFile load_circuit_file(const std::string& path);
void save_circuit_file(const std::string& path, const CircuitFile& file);

}  // namespace locc::ctc
