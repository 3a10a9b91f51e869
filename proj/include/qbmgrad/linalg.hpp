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

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace qbm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr int kMaxDim = 256;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kStateTol = 1e-10;

struct BipartiteDims {
  int visible = 1;
  int hidden = 1;

  int total() const { return visible * hidden; }
  void validate() const;
};

// Square complex matrix equal to its conjugate transpose. Inputs that are
// Hermitian up to kHermitianTol are symmetrized, anything else is rejected.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const CMatrix& m);

  // For matrices produced by arithmetic that is Hermitian in exact
  // arithmetic; the tolerance scales with the magnitude of the entries.
  static HermitianOperator from_computed(const CMatrix& m);
  static HermitianOperator identity(int d);
  static HermitianOperator zero(int d);
  static HermitianOperator diagonal(const RVector& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double c) const;

 private:
  struct Trusted {};
  HermitianOperator(CMatrix m, Trusted) : m_(std::move(m)) {}
  CMatrix m_;
};

// Positive semidefinite, unit trace.
class QuantumState {
 public:
  QuantumState() = default;
  explicit QuantumState(const HermitianOperator& op);
  explicit QuantumState(const CMatrix& m) : QuantumState(HermitianOperator(m)) {}

  static QuantumState maximally_mixed(int d);
  static QuantumState diagonal(const RVector& probs);
  static QuantumState pure(const CVector& psi);

  int dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }

 private:
  HermitianOperator op_;
};

// Eigenvalues in ascending order, eigenvectors as columns.
struct SpectralDecomposition {
  RVector values;
  CMatrix vectors;

  int dim() const { return static_cast<int>(values.size()); }
  CMatrix reconstruct() const;
  double min() const { return values(0); }
  double max() const { return values(values.size() - 1); }
  // Rotates a matrix into / out of the eigenbasis.
  CMatrix to_eigenbasis(const CMatrix& y) const;
  CMatrix from_eigenbasis(const CMatrix& y) const;
};

SpectralDecomposition eigh(const HermitianOperator& x);

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

enum class Keep { Visible, Hidden };

CMatrix partial_trace(const CMatrix& x, const BipartiteDims& dims, Keep keep);
HermitianOperator partial_trace(const HermitianOperator& x, const BipartiteDims& dims,
                                Keep keep);

// f applied to the eigenvalues. Throws NumericalError if f is not finite at
// some eigenvalue (ln 0, negative powers of zero, ...).
HermitianOperator matrix_function(const SpectralDecomposition& spec,
                                  const std::function<double(double)>& f);
CMatrix matrix_function_complex(const SpectralDecomposition& spec,
                                const std::function<Complex(double)>& f);

// Re Tr[obs * state]; throws NumericalError if the imaginary residue
// exceeds 1e-10 relative to the operand scale.
double expectation(const HermitianOperator& obs, const HermitianOperator& state);
double expectation(const HermitianOperator& obs, const QuantumState& state);

// Re Tr[a * b] without forming the product.
double trace_product_real(const CMatrix& a, const CMatrix& b);
Complex trace_product(const CMatrix& a, const CMatrix& b);

struct Norms {
  double spectral = 0.0;
  double trace = 0.0;
};

Norms norms(const HermitianOperator& x);
double spectral_norm(const CMatrix& a);
double trace_norm(const CMatrix& a);
double hermiticity_defect(const CMatrix& a);

// Random instances for tests, verification and demos.
CMatrix random_hermitian(int d, std::mt19937_64& rng, double scale = 1.0);
CMatrix random_unitary(int d, std::mt19937_64& rng);
QuantumState random_state(int d, std::mt19937_64& rng, int rank = -1);

}  // namespace qbm
