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

#include "locc/channels.hpp"

#include <cmath>

namespace locc::channels {

QuantumChannel QuantumChannel::make(long dim_in, long dim_out,
                                    std::vector<ComplexMatrix> kraus) {
  if (dim_in < 1 || dim_out < 1)
    throw DimensionError("channel dimensions must be >= 1");
  if (kraus.empty()) throw StateError("channel needs at least one operator");
  for (const auto& k : kraus) {
    if (k.rows() != dim_out || k.cols() != dim_in)
      throw DimensionError("Kraus operator shape does not match channel");
  }
  ComplexMatrix sum = ComplexMatrix::Zero(dim_in, dim_in);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  sum -= ComplexMatrix::Identity(dim_in, dim_in);
  if (sum.cwiseAbs().maxCoeff() > kTracePreservingTol)
    throw StateError("channel is not trace preserving within 1e-10");
  return QuantumChannel(dim_in, dim_out, std::move(kraus));
}

QuantumChannel QuantumChannel::identity(long dim) {
  std::vector<ComplexMatrix> ks;
  ks.push_back(ComplexMatrix::Identity(dim, dim));
  return QuantumChannel(dim, dim, std::move(ks));
}

DensityMatrix QuantumChannel::apply(const DensityMatrix& state) const {
  if (state.dim() != dim_in_)
    throw DimensionError("channel input dimension mismatch");
  return DensityMatrix::unchecked(apply_raw(state.matrix()));
}

ComplexMatrix QuantumChannel::apply_raw(const ComplexMatrix& m) const {
  ComplexMatrix out = ComplexMatrix::Zero(dim_out_, dim_out_);
  for (const auto& k : kraus_) out += k * m * k.adjoint();
  return out;
}

QuantumChannel dephasing_channel(int n_qubits, double strength) {
  if (n_qubits < 1) throw DimensionError("dephasing needs at least one qubit");
  if (n_qubits > qmath::max_register_qubits())
    throw SizeLimitError("dephasing_channel: register cap exceeded");
  if (!(strength >= 0.0 && strength <= 1.0))
    throw DomainError("dephasing strength must lie in [0, 1]");
  const long dim = 1L << n_qubits;
  std::vector<ComplexMatrix> ks;
  ks.reserve(size_t(dim) + 1);
  ks.push_back(std::sqrt(1.0 - strength) * ComplexMatrix::Identity(dim, dim));
  const double root = std::sqrt(strength);
  for (long i = 0; i < dim; ++i) {
    ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
    k(i, i) = root;
    ks.push_back(std::move(k));
  }
  return QuantumChannel::make(dim, dim, std::move(ks));
}

DensityMatrix werner_state(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("Werner parameter must lie in [0, 1]");
  ComplexMatrix m = (1.0 - p) / 4.0 * ComplexMatrix::Identity(4, 4);
  const auto bell = qmath::bell_phi_plus().amplitudes();
  m += p * (bell * bell.adjoint());
  return DensityMatrix::unchecked(std::move(m));
}

QuantumChannel DecoherenceSwitch::channel(int n_qubits) const {
  if (!on) return QuantumChannel::identity(1L << n_qubits);
  return dephasing_channel(n_qubits, strength);
}

DensityMatrix DecoherenceSwitch::applied_to(const DensityMatrix& state) const {
  if (!on) return state;
  long dim = state.dim();
  int n = 0;
  while ((1L << n) < dim) ++n;
  if ((1L << n) != dim)
    throw DimensionError("decoherence switch needs a qubit register");
  return channel(n).apply(state);
}

}  // namespace locc::channels
