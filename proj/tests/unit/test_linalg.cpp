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

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "catch_amalgamated.hpp"
#include "qbmgrad/errors.hpp"
#include "qbmgrad/linalg.hpp"

using namespace qbm;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix pauli_z() {
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

// Partial trace by explicit index sums.
CMatrix trace_out_hidden(const CMatrix& x, int dv, int dh) {
  CMatrix out = CMatrix::Zero(dv, dv);
  for (int a = 0; a < dv; ++a)
    for (int b = 0; b < dv; ++b)
      for (int h = 0; h < dh; ++h) out(a, b) += x(a * dh + h, b * dh + h);
  return out;
}

CMatrix trace_out_visible(const CMatrix& x, int dv, int dh) {
  CMatrix out = CMatrix::Zero(dh, dh);
  for (int a = 0; a < dh; ++a)
    for (int b = 0; b < dh; ++b)
      for (int v = 0; v < dv; ++v) out(a, b) += x(v * dh + a, v * dh + b);
  return out;
}

}  // namespace

TEST_CASE("hermitian operator validation") {
  CMatrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, -1), 2;
  REQUIRE_NOTHROW(HermitianOperator(m));

  CMatrix nearly = m;
  nearly(0, 1) += 5e-13;
  const HermitianOperator h(nearly);
  CHECK(hermiticity_defect(h.matrix()) == 0.0);

  CMatrix off = m;
  off(0, 1) += 1e-11;
  CHECK_THROWS_AS(HermitianOperator(off), InputError);
  CHECK_THROWS_AS(HermitianOperator(CMatrix::Zero(2, 3)), InputError);
  CHECK_THROWS_AS(HermitianOperator(CMatrix::Identity(257, 257)), InputError);
  CHECK_NOTHROW(HermitianOperator(CMatrix::Identity(256, 256)));
}

TEST_CASE("quantum state validation") {
  CHECK_NOTHROW(QuantumState::maximally_mixed(3));
  CHECK_THROWS_AS(QuantumState(CMatrix(CMatrix::Identity(2, 2))), InputError);
  RVector bad(2);
  bad << 1.2, -0.2;
  CHECK_THROWS_AS(QuantumState::diagonal(bad), InputError);
  RVector edge(2);
  edge << 1.0 + 5e-11, -5e-11;
  CHECK_NOTHROW(QuantumState::diagonal(edge));
  CVector psi(2);
  psi << 3.0, Complex(0, 4.0);
  const QuantumState pure = QuantumState::pure(psi);
  CHECK_THAT(pure.matrix()(1, 1).real(), WithinAbs(16.0 / 25.0, 1e-15));
}

TEST_CASE("norms of simple operators") {
  const HermitianOperator id = HermitianOperator::identity(3);
  CHECK_THAT(norms(id).spectral, WithinAbs(1.0, 1e-14));
  CHECK_THAT(norms(id).trace, WithinAbs(3.0, 1e-14));
  CHECK_THAT(norms(HermitianOperator(pauli_z())).spectral, WithinAbs(1.0, 1e-14));
}

TEST_CASE("eigh is ascending and reconstructs") {
  const int seed = GENERATE(range(0, 8));
  std::mt19937_64 rng(seed);
  const int d = 2 + seed;
  const HermitianOperator x(random_hermitian(d, rng, 3.0));
  const SpectralDecomposition s = eigh(x);
  for (int i = 1; i < d; ++i) CHECK(s.values(i) >= s.values(i - 1));
  CHECK((s.reconstruct() - x.matrix()).cwiseAbs().maxCoeff() < 1e-10 * d);
  // Trace and Frobenius norm are spectral invariants.
  CHECK_THAT(s.values.sum(), WithinAbs(x.matrix().trace().real(), 1e-12));
  CHECK_THAT(s.values.squaredNorm(), WithinAbs(x.matrix().squaredNorm(), 1e-11));
  CHECK_THAT(norms(x).spectral, WithinAbs(3.0, 1e-12));
}

TEST_CASE("partial trace matches index sums") {
  const int seed = GENERATE(range(0, 5));
  std::mt19937_64 rng(100 + seed);
  const BipartiteDims dims{2 + seed % 3, 1 + seed % 2 + 1};
  const CMatrix x = random_hermitian(dims.total(), rng);
  CHECK((partial_trace(x, dims, Keep::Visible) - trace_out_hidden(x, dims.visible, dims.hidden))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK((partial_trace(x, dims, Keep::Hidden) - trace_out_visible(x, dims.visible, dims.hidden))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("kron and partial trace of products") {
  std::mt19937_64 rng(5);
  const QuantumState a = random_state(3, rng);
  const QuantumState b = random_state(2, rng);
  const CMatrix ab = kron(a.matrix(), b.matrix());
  CHECK((partial_trace(ab, {3, 2}, Keep::Visible) - a.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((partial_trace(ab, {3, 2}, Keep::Hidden) - b.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(partial_trace(ab, {2, 2}, Keep::Visible), InputError);
}

TEST_CASE("matrix function agrees with the matrix exponential") {
  const int seed = GENERATE(range(0, 5));
  std::mt19937_64 rng(200 + seed);
  const HermitianOperator x(random_hermitian(4, rng, 2.0));
  const CMatrix e = matrix_function(eigh(x), [](double l) { return std::exp(l); }).matrix();
  CHECK((e - CMatrix(x.matrix().exp())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(matrix_function(eigh(x), [](double l) { return std::log(l - 10.0); }),
                  NumericalError);
}

TEST_CASE("trace products") {
  std::mt19937_64 rng(9);
  const CMatrix a = random_hermitian(5, rng);
  const CMatrix b = random_hermitian(5, rng) + Complex(0, 1) * random_hermitian(5, rng);
  CHECK(std::abs(trace_product(a, b) - (a * b).trace()) < 1e-14);
  CHECK_THAT(trace_product_real(a, b), WithinAbs((a * b).trace().real(), 1e-14));
}

TEST_CASE("random generators") {
  const int seed = GENERATE(range(0, 5));
  std::mt19937_64 rng(300 + seed);
  const CMatrix u = random_unitary(4, rng);
  CHECK((u.adjoint() * u - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
  const QuantumState rho = random_state(4, rng, 2);
  const SpectralDecomposition s = eigh(rho.op());
  CHECK(s.values(0) > -1e-12);
  CHECK(s.values(1) < 1e-12);  // rank 2
  CHECK_THAT(rho.matrix().trace().real(), WithinAbs(1.0, 1e-14));
}

TEST_CASE("expectation of a Hermitian observable is real") {
  std::mt19937_64 rng(4);
  const QuantumState rho = random_state(3, rng);
  const HermitianOperator o(random_hermitian(3, rng));
  CHECK_THAT(expectation(o, rho), WithinAbs((o.matrix() * rho.matrix()).trace().real(), 1e-15));
}

TEST_CASE("bipartite dimension guard") {
  CHECK_NOTHROW((BipartiteDims{16, 16}.validate()));
  CHECK_THROWS_AS((BipartiteDims{16, 17}.validate()), InputError);
  CHECK_THROWS_AS((BipartiteDims{0, 2}.validate()), InputError);
}
