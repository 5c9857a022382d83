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

#include "locc/ctc.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace locc::ctc {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kEigenvalueOneTol = 1e-8;
// Negligible spectral weight in the input decomposition.
constexpr double kWeightFloor = 1e-14;

// Column-major vectorization: vec(K rho K^dag) = (conj(K) kron K) vec(rho).
ComplexMatrix superoperator(const QuantumChannel& ch) {
  const long d = ch.dim_out();
  ComplexMatrix m = ComplexMatrix::Zero(d * d, d * d);
  for (const ComplexMatrix& k : ch.kraus()) m += qmath::kron(k.conjugate(), k);
  return m;
}

long eigenvalue_one_multiplicity(const ComplexMatrix& superop) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(superop, false);
  long count = 0;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - 1.0) <= kEigenvalueOneTol) ++count;
  return count;
}

ComplexMatrix unvec(const Eigen::VectorXcd& v, long d) {
  ComplexMatrix m(d, d);
  for (long j = 0; j < d; ++j) m.col(j) = v.segment(j * d, d);
  return m;
}

Eigen::VectorXcd vec(const ComplexMatrix& m) {
  Eigen::VectorXcd v(m.rows() * m.cols());
  for (long j = 0; j < m.cols(); ++j)
    v.segment(j * m.rows(), m.rows()) = m.col(j);
  return v;
}

// Hermitize, clip tiny negative eigenvalues, renormalize the trace.
DensityMatrix tidy_state(const ComplexMatrix& raw) {
  ComplexMatrix h = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  double sum = 0.0;
  for (long i = 0; i < ev.size(); ++i) {
    if (ev(i) < 0.0) ev(i) = 0.0;
    sum += ev(i);
  }
  if (sum <= 0.0) throw StateError("fixed-point candidate has no weight");
  ev /= sum;
  ComplexMatrix out = es.eigenvectors() * ev.asDiagonal() *
                      es.eigenvectors().adjoint();
  return DensityMatrix::unchecked(std::move(out));
}

}  // namespace

CtcCircuit CtcCircuit::make(long dim_ch, long dim_tv, ComplexMatrix unitary) {
  if (dim_ch < 1) throw DimensionError("dim_ch must be >= 1");
  if (dim_tv < 2) throw DimensionError("dim_tv must be >= 2");
  if (dim_ch * dim_tv > kMaxTotalDim)
    throw SizeLimitError("circuit dimension exceeds the cap of 256");
  if (dim_tv > kMaxTimeTravelDim)
    throw SizeLimitError("time-traveling register dimension exceeds 32");
  if (unitary.rows() != dim_ch * dim_tv || unitary.cols() != dim_ch * dim_tv)
    throw DimensionError("unitary does not match dim_ch * dim_tv");
  if (!qmath::is_unitary(unitary, kUnitaryTol))
    throw StateError("circuit matrix is not unitary within 1e-10");
  return CtcCircuit(dim_ch, dim_tv, std::move(unitary));
}

QuantumChannel induced_map(const CtcCircuit& circuit,
                           const DensityMatrix& rho_in) {
  if (rho_in.dim() != circuit.dim_ch())
    throw DimensionError("rho_in does not match the chronology register");
  const long dch = circuit.dim_ch();
  const long dtv = circuit.dim_tv();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_in.matrix());
  std::vector<ComplexMatrix> kraus;
  for (long i = 0; i < dch; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam <= kWeightFloor) continue;
    const double root = std::sqrt(lam);
    // Columns of U restricted to input vector v_i on the chronology factor.
    ComplexMatrix w(dch * dtv, dtv);
    w.setZero();
    for (long c = 0; c < dch; ++c)
      w += es.eigenvectors()(c, i) *
           circuit.unitary().middleCols(c * dtv, dtv);
    for (long j = 0; j < dch; ++j)
      kraus.push_back(root * w.middleRows(j * dtv, dtv));
  }
  return QuantumChannel::make(dtv, dtv, std::move(kraus));
}

FixedPointResult solve_fixed_point(const CtcCircuit& circuit,
                                   const DensityMatrix& rho_in,
                                   const SolveOptions& options) {
  if (!(options.residual_target > 0.0))
    throw DomainError("residual target must be positive");
  if (options.iteration_cap < 1)
    throw DomainError("iteration cap must be >= 1");
  const QuantumChannel map = induced_map(circuit, rho_in);
  const long d = circuit.dim_tv();
  const ComplexMatrix superop = superoperator(map);
  const long fixed_dim = eigenvalue_one_multiplicity(superop);

  auto residual_of = [&](const ComplexMatrix& rho) {
    return qmath::trace_norm(map.apply_raw(rho) - rho);
  };

  FixedPointResult result{DensityMatrix::maximally_mixed(d), 0.0, fixed_dim,
                          FixedPointMethod::CesaroIteration, 0};

  ComplexMatrix rho = result.rho.matrix();
  double best = residual_of(rho);
  long applied = 0;
  if (best <= options.residual_target) {
    result.residual = best;
    return result;
  }

  const bool try_iterative = options.mode != SolveOptions::Mode::EigenOnly;
  const bool may_fall_back = options.mode == SolveOptions::Mode::Auto;

  if (try_iterative) {
    // Orbit-segment averaging, restarted: each pass replaces rho by the
    // average of its next segment_len images. Averaging damps every
    // eigenvalue away from one, and restarting compounds the damping
    // geometrically. Segments grow so small spectral gaps still resolve.
    long segment_len = 64;
    constexpr long kMaxSegment = 16384;
    ComplexMatrix current(d, d), sum(d, d);
    while (applied < options.iteration_cap) {
      const long len =
          std::min(segment_len, options.iteration_cap - applied + 1);
      if (len < 2) break;
      sum = rho;
      current = rho;
      for (long k = 1; k < len; ++k) {
        current = map.apply_raw(current);
        sum += current;
      }
      applied += len - 1;
      rho = sum / double(len);
      const double r = residual_of(rho);
      if (r < best) best = r;
      if (r <= options.residual_target) {
        result.rho = tidy_state(rho);
        result.residual = residual_of(result.rho.matrix());
        result.iterations = applied;
        result.method = FixedPointMethod::CesaroIteration;
        if (result.residual <= options.residual_target) return result;
      }
      segment_len = std::min(segment_len * 2, kMaxSegment);
    }
    if (!may_fall_back) {
      throw ConvergenceError(
          "fixed-point iteration exhausted its budget; best residual " +
              std::to_string(best),
          best);
    }
  }

  // Spectral projection onto the eigenvalue-one subspace: powers of
  // (M + I)/2 kill every other eigenvalue and leave the projector.
  const long dd = d * d;
  ComplexMatrix b = 0.5 * (superop + ComplexMatrix::Identity(dd, dd));
  for (int k = 0; k < 56; ++k) b = b * b;
  const ComplexMatrix seed =
      ComplexMatrix::Identity(d, d) / double(d);
  const Eigen::VectorXcd projected = b * vec(seed);
  DensityMatrix candidate = tidy_state(unvec(projected, d));
  const double r = residual_of(candidate.matrix());
  if (r < best) best = r;
  if (r > options.residual_target)
    throw ConvergenceError(
        "fixed-point solve failed; best residual " + std::to_string(best),
        best);
  result.rho = std::move(candidate);
  result.residual = r;
  result.iterations = applied;
  result.method = FixedPointMethod::EigenProjection;
  return result;
}

DensityMatrix circuit_output(const CtcCircuit& circuit,
                             const DensityMatrix& rho_in,
                             const FixedPointResult& fixed_point) {
  if (rho_in.dim() != circuit.dim_ch())
    throw DimensionError("rho_in does not match the chronology register");
  if (fixed_point.rho.dim() != circuit.dim_tv())
    throw DimensionError("fixed point does not match the time-traveling register");
  const ComplexMatrix joint =
      qmath::kron(rho_in.matrix(), fixed_point.rho.matrix());
  const ComplexMatrix evolved =
      circuit.unitary() * joint * circuit.unitary().adjoint();
  return DensityMatrix::unchecked(qmath::partial_trace_raw(
      evolved, circuit.dim_ch(), circuit.dim_tv(), qmath::Side::Right));
}

CtcCircuit CircuitFile::circuit() const {
  return CtcCircuit::make(dim_ch, dim_tv, unitary);
}

DensityMatrix CircuitFile::input_state() const {
  return DensityMatrix::make(rho_in);
}

namespace {

std::vector<std::string> tokenize_circuit_text(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  return tokens;
}

double take_number(const std::vector<std::string>& tokens, std::size_t* pos,
                   const char* what) {
  if (*pos >= tokens.size())
    throw IoError(std::string("circuit file: missing ") + what);
  char* end = nullptr;
  const double v = std::strtod(tokens[*pos].c_str(), &end);
  if (end == tokens[*pos].c_str() || *end != '\0')
    throw IoError(std::string("circuit file: bad number for ") + what + ": '" +
                  tokens[*pos] + "'");
  ++*pos;
  return v;
}

void take_keyword(const std::vector<std::string>& tokens, std::size_t* pos,
                  const char* key) {
  if (*pos >= tokens.size() || tokens[*pos] != key)
    throw IoError(std::string("circuit file: expected '") + key + "'");
  ++*pos;
}

ComplexMatrix take_matrix(const std::vector<std::string>& tokens,
                          std::size_t* pos, long dim, const char* what) {
  ComplexMatrix m(dim, dim);
  for (long i = 0; i < dim; ++i) {
    for (long j = 0; j < dim; ++j) {
      const double re = take_number(tokens, pos, what);
      const double im = take_number(tokens, pos, what);
      m(i, j) = qmath::Complex(re, im);
    }
  }
  return m;
}

}  // namespace

CircuitFile load_circuit_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const std::vector<std::string> tokens = tokenize_circuit_text(in);
  std::size_t pos = 0;
  CircuitFile file;
  take_keyword(tokens, &pos, "dim-ch");
  file.dim_ch = long(take_number(tokens, &pos, "dim-ch"));
  take_keyword(tokens, &pos, "dim-tv");
  file.dim_tv = long(take_number(tokens, &pos, "dim-tv"));
  if (file.dim_ch < 1 || file.dim_tv < 2)
    throw IoError("circuit file: dimensions out of range");
  if (file.dim_ch * file.dim_tv > kMaxTotalDim ||
      file.dim_tv > kMaxTimeTravelDim)
    throw IoError("circuit file: dimensions exceed the solver caps");
  take_keyword(tokens, &pos, "unitary");
  file.unitary = take_matrix(tokens, &pos, file.dim_ch * file.dim_tv, "unitary");
  take_keyword(tokens, &pos, "rho-in");
  file.rho_in = take_matrix(tokens, &pos, file.dim_ch, "rho-in");
  if (pos != tokens.size())
    throw IoError("circuit file: trailing tokens after rho-in block");
  return file;
}

void save_circuit_file(const std::string& path, const CircuitFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# loccsim circuit v1\n";
  out << "dim-ch " << file.dim_ch << '\n';
  out << "dim-tv " << file.dim_tv << '\n';
  char buf[64];
  auto write_matrix = [&](const ComplexMatrix& m) {
    for (long i = 0; i < m.rows(); ++i) {
      for (long j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        std::snprintf(buf, sizeof buf, "%.17g %.17g", m(i, j).real(),
                      m(i, j).imag());
        out << buf;
      }
      out << '\n';
    }
  };
  out << "unitary\n";
  write_matrix(file.unitary);
  out << "rho-in\n";
  write_matrix(file.rho_in);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace locc::ctc
