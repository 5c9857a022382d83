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

#include "locc/qmath.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace locc::qmath {

namespace {

std::atomic<int> g_max_qubits{12};

const double kInvSqrt2 = 0.70710678118654752440;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

int max_register_qubits() { return g_max_qubits.load(); }

void set_max_register_qubits(int n) {
  if (n < 1 || n > 20) throw DomainError("register cap must be in [1, 20]");
  g_max_qubits.store(n);
}

long max_register_dim() { return 1L << g_max_qubits.load(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  ComplexMatrix d = m.adjoint() * m;
  d -= ComplexMatrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double trace_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("trace_distance: shape mismatch");
  return 0.5 * trace_norm(a - b);
}

ComplexMatrix partial_trace_raw(const ComplexMatrix& m, long dim_left,
                                long dim_right, Side traced_out) {
  if (dim_left < 1 || dim_right < 1)
    throw DimensionError("partial_trace: factor dimensions must be >= 1");
  if (m.rows() != dim_left * dim_right || m.cols() != dim_left * dim_right)
    throw DimensionError("partial_trace: bipartition does not match operator");
  if (traced_out == Side::Right) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_left, dim_left);
    for (long a = 0; a < dim_left; ++a)
      for (long b = 0; b < dim_left; ++b)
        for (long c = 0; c < dim_right; ++c)
          out(a, b) += m(a * dim_right + c, b * dim_right + c);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_right, dim_right);
  for (long c = 0; c < dim_right; ++c)
    for (long d = 0; d < dim_right; ++d)
      for (long a = 0; a < dim_left; ++a)
        out(c, d) += m(a * dim_right + c, a * dim_right + d);
  return out;
}

DensityMatrix DensityMatrix::make(ComplexMatrix m) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw DimensionError("density matrix must be square and nonempty");
  if (m.rows() > max_register_dim())
    throw SizeLimitError("density matrix exceeds the register cap");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw StateError("density matrix is not Hermitian within 1e-12");
  if (std::abs(m.trace().real() - 1.0) > kTraceTol ||
      std::abs(m.trace().imag()) > kTraceTol)
    throw StateError("density matrix trace differs from one by more than 1e-12");
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigenClip)
    throw StateError("density matrix has an eigenvalue below -1e-10");
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) {
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::maximally_mixed(long dim) {
  if (dim < 1) throw DimensionError("dimension must be >= 1");
  if (dim > max_register_dim())
    throw SizeLimitError("dimension exceeds the register cap");
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim) / double(dim);
  return DensityMatrix(std::move(m));
}

void DensityMatrix::validate() const {
  if (!is_hermitian(mat_, kHermitianTol))
    throw StateError("density matrix is not Hermitian within 1e-12");
  if (std::abs(mat_.trace().real() - 1.0) > kTraceTol ||
      std::abs(mat_.trace().imag()) > kTraceTol)
    throw StateError("density matrix trace differs from one by more than 1e-12");
  if (hermitian_eigenvalues(mat_).minCoeff() < -kEigenClip)
    throw StateError("density matrix has an eigenvalue below -1e-10");
}

PureState PureState::make(ComplexVector amplitudes) {
  if (amplitudes.size() < 1) throw DimensionError("state vector is empty");
  if (amplitudes.size() > max_register_dim())
    throw SizeLimitError("state vector exceeds the register cap");
  if (std::abs(amplitudes.norm() - 1.0) > kNormTol)
    throw StateError("state vector norm differs from one by more than 1e-12");
  return PureState(std::move(amplitudes));
}

DensityMatrix PureState::density() const {
  return DensityMatrix::unchecked(amps_ * amps_.adjoint());
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() * b.dim() > max_register_dim())
    throw SizeLimitError("tensor product exceeds the register cap");
  return DensityMatrix::unchecked(kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& state, Bipartition part,
                            Side traced_out) {
  return DensityMatrix::unchecked(partial_trace_raw(
      state.matrix(), part.dim_left, part.dim_right, traced_out));
}

double von_neumann_entropy(const DensityMatrix& state) {
  RealVector ev = hermitian_eigenvalues(state.matrix());
  double s = 0.0;
  for (long i = 0; i < ev.size(); ++i) {
    const double lam = ev(i);
    if (lam < -kEigenClip)
      throw StateError("entropy input has an eigenvalue below -1e-10");
    if (lam <= 0.0) continue;
    s -= lam * std::log(lam);
  }
  return s > 0.0 ? s : 0.0;
}

double entanglement_entropy(const DensityMatrix& state, Bipartition part) {
  if (part.dim_left * part.dim_right != state.dim())
    throw DimensionError("entanglement_entropy: bipartition does not match");
  const double p = state.purity();
  if (p < 1.0 - kPurityTol) {
    throw PurityError("entanglement entropy requires a pure state; purity = " +
                      format_number(p));
  }
  return von_neumann_entropy(partial_trace(state, part, Side::Right));
}

DensityMatrix reduce_to_qubits(const DensityMatrix& state, unsigned keep_mask) {
  long dim = state.dim();
  int n = 0;
  while ((1L << n) < dim) ++n;
  if ((1L << n) != dim)
    throw DimensionError("reduce_to_qubits: dimension is not a power of two");
  if (n > max_register_qubits())
    throw SizeLimitError("reduce_to_qubits: register cap exceeded");
  std::vector<int> keep, comp;
  for (int q = 0; q < n; ++q) {
    if (keep_mask & (1u << q))
      keep.push_back(q);
    else
      comp.push_back(q);
  }
  if (keep.empty() || (keep_mask >> n) != 0)
    throw DomainError("reduce_to_qubits: mask must select qubits in range");
  const int nk = int(keep.size());
  const int nc = int(comp.size());
  // Qubit q occupies basis-index bit (n - 1 - q); kept qubits keep their
  // relative order in the reduced register.
  auto scatter = [&](const std::vector<int>& qs, long x) {
    long pos = 0;
    for (size_t i = 0; i < qs.size(); ++i) {
      const long bit = (x >> (qs.size() - 1 - i)) & 1;
      pos |= bit << (n - 1 - qs[i]);
    }
    return pos;
  };
  const long dk = 1L << nk;
  const long dc = 1L << nc;
  std::vector<long> keep_pos(dk), comp_pos(dc);
  for (long a = 0; a < dk; ++a) keep_pos[a] = scatter(keep, a);
  for (long c = 0; c < dc; ++c) comp_pos[c] = scatter(comp, c);
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  const ComplexMatrix& rho = state.matrix();
  for (long a = 0; a < dk; ++a)
    for (long b = 0; b < dk; ++b)
      for (long c = 0; c < dc; ++c)
        out(a, b) += rho(keep_pos[a] | comp_pos[c], keep_pos[b] | comp_pos[c]);
  return DensityMatrix::unchecked(std::move(out));
}

double max_entanglement_entropy(const DensityMatrix& state) {
  long dim = state.dim();
  int n = 0;
  while ((1L << n) < dim) ++n;
  if ((1L << n) != dim)
    throw DimensionError(
        "max_entanglement_entropy: dimension is not a power of two");
  if (n > max_register_qubits())
    throw SizeLimitError("max_entanglement_entropy: register cap exceeded");
  const double p = state.purity();
  if (p < 1.0 - kPurityTol) {
    throw PurityError(
        "max entanglement entropy requires a pure state; purity = " +
        format_number(p));
  }
  if (n <= 1) return 0.0;
  // Every bipartition into a subset and its complement is counted once by
  // pinning qubit 0 to the kept side.
  double best = 0.0;
  const unsigned full = (1u << n) - 1u;
  for (unsigned mask = 1; mask < full; mask += 2) {
    const double s = von_neumann_entropy(reduce_to_qubits(state, mask));
    if (s > best) best = s;
  }
  return best;
}

bool is_entangled_2q(const DensityMatrix& state) {
  if (state.dim() != 4)
    throw DimensionError("is_entangled_2q requires a two-qubit state");
  const ComplexMatrix& rho = state.matrix();
  ComplexMatrix pt(4, 4);
  // Transpose the right (fast) factor.
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 2; ++b)
      for (long c = 0; c < 2; ++c)
        for (long d = 0; d < 2; ++d)
          pt(2 * a + c, 2 * b + d) = rho(2 * a + d, 2 * b + c);
  return hermitian_eigenvalues(pt).minCoeff() < -kEigenClip;
}

PureState bell_phi_plus() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = kInvSqrt2;
  v(3) = kInvSqrt2;
  return PureState::make(std::move(v));
}

PureState ghz_state(int n_qubits) {
  if (n_qubits < 1) throw DomainError("ghz_state needs at least one qubit");
  if (n_qubits > max_register_qubits())
    throw SizeLimitError("ghz_state: register cap exceeded");
  const long dim = 1L << n_qubits;
  ComplexVector v = ComplexVector::Zero(dim);
  v(0) = kInvSqrt2;
  v(dim - 1) = kInvSqrt2;
  return PureState::make(std::move(v));
}

PureState basis_state(long dim, long index) {
  if (dim < 1) throw DimensionError("dimension must be >= 1");
  if (dim > max_register_dim())
    throw SizeLimitError("basis_state: register cap exceeded");
  if (index < 0 || index >= dim)
    throw DomainError("basis_state: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureState::make(std::move(v));
}

std::string dump_matrix(const ComplexMatrix& m) {
  std::ostringstream out;
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[128];
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g%+.17gi", m(i, j).real(),
                    m(i, j).imag());
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

ComplexMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw IoError("matrix dump: bad header line");
  ComplexMatrix m(rows, cols);
  std::string tok;
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(in >> tok)) throw IoError("matrix dump: too few entries");
      double re = 0.0, im = 0.0;
      char suffix = 0;
      if (std::sscanf(tok.c_str(), "%lg%lg%c", &re, &im, &suffix) != 3 ||
          suffix != 'i')
        throw IoError("matrix dump: bad entry '" + tok + "'");
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

}  // namespace locc::qmath
