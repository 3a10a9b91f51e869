// Copyright 2026 The qbmgrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qbmgrad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbmgrad/errors.hpp"

namespace qbm {

namespace {

void check_shape(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw InputError("operator must be square, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  if (m.rows() < 1 || m.rows() > kMaxDim) {
    throw InputError("operator dimension " + std::to_string(m.rows()) +
                     " outside [1, " + std::to_string(kMaxDim) + "]");
  }
  if (!m.allFinite()) throw InputError("operator has non-finite entries");
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

void BipartiteDims::validate() const {
  if (visible < 1 || hidden < 1) throw InputError("subsystem dimensions must be positive");
  if (total() > kMaxDim) {
    throw InputError("joint dimension " + std::to_string(total()) + " exceeds " +
                     std::to_string(kMaxDim));
  }
}

double hermiticity_defect(const CMatrix& a) { return max_abs(a - a.adjoint()); }

HermitianOperator::HermitianOperator(const CMatrix& m) {
  check_shape(m);
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianTol) {
    throw InputError("operator is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::from_computed(const CMatrix& m) {
  check_shape(m);
  const double defect = hermiticity_defect(m);
  if (defect > 1e-9 * std::max(1.0, max_abs(m))) {
    throw NumericalError("computed operator lost Hermiticity (defect " +
                         std::to_string(defect) + ")");
  }
  return HermitianOperator(CMatrix(0.5 * (m + m.adjoint())), Trusted{});
}

HermitianOperator HermitianOperator::identity(int d) {
  return HermitianOperator(CMatrix::Identity(d, d));
}

HermitianOperator HermitianOperator::zero(int d) { return HermitianOperator(CMatrix::Zero(d, d)); }

HermitianOperator HermitianOperator::diagonal(const RVector& diag) {
  return HermitianOperator(CMatrix(diag.cast<Complex>().asDiagonal()));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw InputError("dimension mismatch in operator sum");
  return HermitianOperator(CMatrix(m_ + o.m_), Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw InputError("dimension mismatch in operator difference");
  return HermitianOperator(CMatrix(m_ - o.m_), Trusted{});
}

HermitianOperator HermitianOperator::operator*(double c) const {
  return HermitianOperator(CMatrix(c * m_), Trusted{});
}

QuantumState::QuantumState(const HermitianOperator& op) : op_(op) {
  const double tr = op.matrix().trace().real();
  if (std::abs(tr - 1.0) > kStateTol) {
    throw InputError("state trace " + std::to_string(tr) + " differs from 1");
  }
  const double lo = eigh(op).min();
  if (lo < -kStateTol) {
    throw InputError("state has negative eigenvalue " + std::to_string(lo));
  }
}

QuantumState QuantumState::maximally_mixed(int d) {
  return QuantumState(HermitianOperator::identity(d) * (1.0 / d));
}

QuantumState QuantumState::diagonal(const RVector& probs) {
  return QuantumState(HermitianOperator::diagonal(probs));
}

QuantumState QuantumState::pure(const CVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw InputError("zero state vector");
  const CVector v = psi / n;
  return QuantumState(HermitianOperator::from_computed(v * v.adjoint()));
}

CMatrix SpectralDecomposition::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

CMatrix SpectralDecomposition::to_eigenbasis(const CMatrix& y) const {
  return vectors.adjoint() * y * vectors;
}

CMatrix SpectralDecomposition::from_eigenbasis(const CMatrix& y) const {
  return vectors * y * vectors.adjoint();
}

SpectralDecomposition eigh(const HermitianOperator& x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(x.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = std::max(1.0, max_abs(x.matrix()));
  const double residual = max_abs(out.reconstruct() - x.matrix());
  if (residual > 1e-10 * x.dim() * scale) {
    throw NumericalError("eigendecomposition residual " + std::to_string(residual));
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() * b.dim() > kMaxDim) throw InputError("tensor product exceeds dimension limit");
  return HermitianOperator::from_computed(kron(a.matrix(), b.matrix()));
}

CMatrix partial_trace(const CMatrix& x, const BipartiteDims& dims, Keep keep) {
  const int dv = dims.visible;
  const int dh = dims.hidden;
  if (x.rows() != dims.total() || x.cols() != dims.total()) {
    throw InputError("partial trace: operator does not match subsystem dimensions");
  }
  if (keep == Keep::Visible) {
    CMatrix out = CMatrix::Zero(dv, dv);
    for (int v = 0; v < dv; ++v)
      for (int w = 0; w < dv; ++w)
        for (int h = 0; h < dh; ++h) out(v, w) += x(v * dh + h, w * dh + h);
    return out;
  }
  CMatrix out = CMatrix::Zero(dh, dh);
  for (int h = 0; h < dh; ++h)
    for (int k = 0; k < dh; ++k)
      for (int v = 0; v < dv; ++v) out(h, k) += x(v * dh + h, v * dh + k);
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& x, const BipartiteDims& dims,
                                Keep keep) {
  return HermitianOperator::from_computed(partial_trace(x.matrix(), dims, keep));
}

HermitianOperator matrix_function(const SpectralDecomposition& spec,
                                  const std::function<double(double)>& f) {
  RVector fv(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    fv(i) = f(spec.values(i));
    if (!std::isfinite(fv(i))) {
      throw NumericalError("matrix function undefined at eigenvalue " +
                           std::to_string(spec.values(i)));
    }
  }
  return HermitianOperator::from_computed(spec.vectors * fv.cast<Complex>().asDiagonal() *
                                          spec.vectors.adjoint());
}

CMatrix matrix_function_complex(const SpectralDecomposition& spec,
                                const std::function<Complex(double)>& f) {
  CVector fv(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    fv(i) = f(spec.values(i));
    if (!std::isfinite(fv(i).real()) || !std::isfinite(fv(i).imag())) {
      throw NumericalError("matrix function undefined at eigenvalue " +
                           std::to_string(spec.values(i)));
    }
  }
  return spec.vectors * fv.asDiagonal() * spec.vectors.adjoint();
}

Complex trace_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

double trace_product_real(const CMatrix& a, const CMatrix& b) {
  return trace_product(a, b).real();
}

double expectation(const HermitianOperator& obs, const HermitianOperator& state) {
  if (obs.dim() != state.dim()) throw InputError("expectation: dimension mismatch");
  const Complex v = trace_product(obs.matrix(), state.matrix());
  const double scale = std::max(1.0, obs.matrix().norm() * state.matrix().norm());
  if (std::abs(v.imag()) > 1e-10 * scale) {
    throw NumericalError("expectation has imaginary residue " + std::to_string(v.imag()));
  }
  return v.real();
}

double expectation(const HermitianOperator& obs, const QuantumState& state) {
  return expectation(obs, state.op());
}

Norms norms(const HermitianOperator& x) {
  const RVector ev = eigh(x).values;
  return {ev.cwiseAbs().maxCoeff(), ev.cwiseAbs().sum()};
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double trace_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().sum();
}

CMatrix random_hermitian(int d, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  CMatrix h = 0.5 * (a + a.adjoint());
  const double s = spectral_norm(h);
  return h * (scale / s);
}

CMatrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    if (std::abs(rjj) > 0) q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

QuantumState random_state(int d, std::mt19937_64& rng, int rank) {
  if (rank <= 0) rank = d;
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = Complex(n(rng), n(rng));
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return QuantumState(HermitianOperator::from_computed(rho));
}

}  // namespace qbm
