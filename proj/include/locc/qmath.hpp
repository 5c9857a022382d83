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

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "locc/errors.hpp"

namespace locc::qmath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
// Eigenvalues in [-kEigenClip, 0) are treated as exact zeros; anything more
// negative is a hard error.
inline constexpr double kEigenClip = 1e-10;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kPurityTol = 1e-10;

// Qubit registers are capped at this many qubits (dimension 2^n). The cap is
// a process-wide runtime setting so tools can lower it.
int max_register_qubits();
void set_max_register_qubits(int n);
long max_register_dim();

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix dagger(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);
bool is_unitary(const ComplexMatrix& m, double tol = 1e-10);
// Ascending eigenvalues of a Hermitian matrix.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);
// Sum of singular values.
double trace_norm(const ComplexMatrix& m);
// Half the trace norm of the difference; both operands must share dimensions.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// Which tensor factor an operation acts on. The left factor is the slow
// (most significant) index.
enum class Side { Left, Right };

struct Bipartition {
  long dim_left = 0;
  long dim_right = 0;
};

// Raw partial trace over one factor of a dim_left x dim_right product space.
ComplexMatrix partial_trace_raw(const ComplexMatrix& m, long dim_left,
                                long dim_right, Side traced_out);

// Density operator: square, Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  // Full validation: Hermitian within 1e-12, trace within 1e-12 of one,
  // eigenvalues >= -1e-10.
  static DensityMatrix make(ComplexMatrix m);

  // For outputs positive by construction (tensor products, partial traces,
  // channel outputs). Symmetrizes but skips the eigenvalue check.
  static DensityMatrix unchecked(ComplexMatrix m);

  static DensityMatrix maximally_mixed(long dim);

  long dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }
  Complex entry(long i, long j) const { return mat_(i, j); }
  double purity() const { return mat_.squaredNorm(); }

  // Re-checks every invariant, throwing on violation.
  void validate() const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

// Unit vector in a finite-dimensional register.
class PureState {
 public:
  // Validates normalization within 1e-12.
  static PureState make(ComplexVector amplitudes);

  long dim() const { return amps_.size(); }
  const ComplexVector& amplitudes() const { return amps_; }
  DensityMatrix density() const;

 private:
  explicit PureState(ComplexVector a) : amps_(std::move(a)) {}
  ComplexVector amps_;
};

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

// Traces out the factor named by traced_out, returning the state of the
// other factor.
DensityMatrix partial_trace(const DensityMatrix& state, Bipartition part,
                            Side traced_out);

// Von Neumann entropy in nats (natural logarithm).
double von_neumann_entropy(const DensityMatrix& state);

// Entropy of one side of a bipartition of a pure state, in nats. Requires
// purity within 1e-10 of one.
double entanglement_entropy(const DensityMatrix& state, Bipartition part);

// Maximum entanglement entropy over all bipartitions of a pure qubit
// register into a nonempty subset of qubits and its complement, in nats.
// Qubit 0 is the most significant index; a single qubit has no nontrivial
// split and scores zero.
double max_entanglement_entropy(const DensityMatrix& state);

// Reduced state on the qubits selected by keep_mask (bit q set keeps qubit
// q; qubit 0 is the most significant index). Kept qubits preserve their
// relative order.
DensityMatrix reduce_to_qubits(const DensityMatrix& state, unsigned keep_mask);

// Peres partial-transpose criterion; exact for two qubits.
bool is_entangled_2q(const DensityMatrix& state);

PureState bell_phi_plus();
PureState ghz_state(int n_qubits);
PureState basis_state(long dim, long index);

// Row-major text dump, one row per line, entries as re+im i with 17
// significant digits; first line holds "rows cols".
std::string dump_matrix(const ComplexMatrix& m);
// Inverse of dump_matrix.
ComplexMatrix parse_matrix(const std::string& text);

}  // namespace locc::qmath
