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

#include <complex>

#include "locc/qmath.hpp"
#include "locc/rng.hpp"

// Reference implementations kept deliberately separate from the library
// code paths, plus random-instance generators for property tests.
namespace testsupport {

using locc::RngStream;
using locc::qmath::Complex;
using locc::qmath::ComplexMatrix;
using locc::qmath::ComplexVector;
using locc::qmath::DensityMatrix;

inline ComplexMatrix kron_ref(const ComplexMatrix& a, const ComplexMatrix& b) {
  const long ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  ComplexMatrix out(ar * br, ac * bc);
  for (long i = 0; i < ar * br; ++i)
    for (long j = 0; j < ac * bc; ++j)
      out(i, j) = a(i / br, j / bc) * b(i % br, j % bc);
  return out;
}

// Partial trace over the right factor via the raw index identity.
inline ComplexMatrix ptrace_right_ref(const ComplexMatrix& m, long dl, long dr) {
  ComplexMatrix out = ComplexMatrix::Zero(dl, dl);
  for (long i = 0; i < dl * dr; ++i) {
    for (long j = 0; j < dl * dr; ++j) {
      if (i % dr != j % dr) continue;
      out(i / dr, j / dr) += m(i, j);
    }
  }
  return out;
}

inline ComplexMatrix ptrace_left_ref(const ComplexMatrix& m, long dl, long dr) {
  ComplexMatrix out = ComplexMatrix::Zero(dr, dr);
  for (long i = 0; i < dl * dr; ++i) {
    for (long j = 0; j < dl * dr; ++j) {
      if (i / dr != j / dr) continue;
      out(i % dr, j % dr) += m(i, j);
    }
  }
  return out;
}

inline ComplexMatrix random_ginibre(RngStream& rng, long rows, long cols) {
  ComplexMatrix g(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j)
      g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
  return g;
}

// Full-rank random density matrix G G^dag / Tr.
inline DensityMatrix random_density(RngStream& rng, long dim) {
  ComplexMatrix g = random_ginibre(rng, dim, dim);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix::make(rho);
}

inline ComplexVector random_pure_vector(RngStream& rng, long dim) {
  ComplexVector v(dim);
  for (long i = 0; i < dim; ++i)
    v(i) = Complex(rng.next_gaussian(), rng.next_gaussian());
  v /= v.norm();
  return v;
}

// Haar-ish random unitary via QR with phase-fixed diagonal.
inline ComplexMatrix random_unitary(RngStream& rng, long dim) {
  ComplexMatrix g = random_ginibre(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double mag = std::abs(d);
    q.col(i) *= mag > 0 ? d / mag : Complex(1, 0);
  }
  return q;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double random_angle(RngStream& rng) {
  return (rng.next_double() * 2.0 - 1.0) * 3.141592653589793238462643383279502884;
}

}  // namespace testsupport
