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
#include "qbmgrad/gradients.hpp"
#include "qbmgrad/instances.hpp"

using namespace qbm;
using namespace qbm::grad;
using Catch::Matchers::WithinAbs;

namespace {

// Objective evaluated from scratch: matrix exponential, index-sum partial
// trace and an eigensolver for the matrix powers.
CMatrix marginal(const CMatrix& g, int dv, int dh) {
  CMatrix e = (-g).exp();
  e /= e.trace();
  CMatrix out = CMatrix::Zero(dv, dv);
  for (int a = 0; a < dv; ++a)
    for (int b = 0; b < dv; ++b)
      for (int h = 0; h < dh; ++h) out(a, b) += e(a * dh + h, b * dh + h);
  return out;
}

CMatrix mpow(const CMatrix& a, double p) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  RVector l = es.eigenvalues();
  for (int i = 0; i < l.size(); ++i) l(i) = l(i) > 1e-300 ? std::pow(l(i), p) : 0.0;
  return es.eigenvectors() * l.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix mlog(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  const RVector l = es.eigenvalues().array().log();
  return es.eigenvectors() * l.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double oracle_divergence(const CMatrix& rho, const CMatrix& sigma, double q) {
  if (q == 1.0) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    double s = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double l = es.eigenvalues()(i);
      if (l > 1e-300) s += l * std::log(l);
    }
    return s - (rho * mlog(sigma)).trace().real();
  }
  return ((mpow(rho, q) * mpow(sigma, 1.0 - q)).trace().real() - 1.0) / (q - 1.0);
}

double oracle_objective(const model::ParamHamiltonian& h, const RVector& theta, const CMatrix& rho,
                        double q) {
  const CMatrix g = h.with_theta(theta).hamiltonian();
  return oracle_divergence(rho, marginal(g, h.dims().visible, h.dims().hidden), q);
}

RVector oracle_gradient(const model::ParamHamiltonian& h, const CMatrix& rho, double q,
                        double step = 1e-5) {
  RVector out(h.num_params());
  for (int j = 0; j < h.num_params(); ++j) {
    RVector tp = h.theta();
    RVector tm = h.theta();
    tp(j) += step;
    tm(j) -= step;
    out(j) = (oracle_objective(h, tp, rho, q) - oracle_objective(h, tm, rho, q)) / (2 * step);
  }
  return out;
}

Objective objective_for(double q) { return q == 1.0 ? Objective::umegaki() : Objective::petz_tsallis(q); }

bool close(const RVector& a, const RVector& b, double rel, double abs) {
  for (int j = 0; j < a.size(); ++j) {
    if (std::abs(a(j) - b(j)) > rel * std::max(std::abs(a(j)), std::abs(b(j))) + abs) return false;
  }
  return true;
}

HermitianOperator pauli_z() {
  RVector d(2);
  d << 1.0, -1.0;
  return HermitianOperator::diagonal(d);
}

}  // namespace

TEST_CASE("objectives match the direct formulas") {
  const int seed = GENERATE(range(0, 4));
  std::mt19937_64 rng(seed);
  const QuantumState rho = random_state(3, rng);
  const QuantumState sigma = random_state(3, rng);
  for (double q : {1.0, 0.3, 0.5, 1.5, 2.0}) {
    CHECK_THAT(relative_entropy(rho, sigma, objective_for(q)),
               WithinAbs(oracle_divergence(rho.matrix(), sigma.matrix(), q), 1e-11));
  }
  CHECK_THAT(relative_entropy(rho, rho, Objective::umegaki()), WithinAbs(0.0, 1e-12));
  CHECK(relative_entropy(rho, sigma, Objective::umegaki()) > 0.0);
  // Continuity of the family at q = 1.
  CHECK_THAT(relative_entropy(rho, sigma, Objective::petz_tsallis(1.0 + 1e-6)),
             WithinAbs(relative_entropy(rho, sigma, Objective::umegaki()), 1e-5));
}

TEST_CASE("order validation") {
  CHECK_THROWS_AS(Objective::petz_tsallis(1.0), InputError);
  CHECK_THROWS_AS(Objective::petz_tsallis(0.0), InputError);
  CHECK_THROWS_AS(Objective::petz_tsallis(2.5), InputError);
  CHECK_NOTHROW(Objective::petz_tsallis(2.0));
}

TEST_CASE("generic gradient matches finite differences") {
  const int seed = GENERATE(range(0, 6));
  const double q = GENERATE(1.0, 0.5, 1.5, 2.0);
  std::mt19937_64 rng(100 + seed);
  const BipartiteDims dims{2 + seed % 3, 1 + seed % 2};
  const auto h = instances::random_generic(dims, 4, rng);
  const QuantumState rho = random_state(dims.visible, rng);
  const GradientReport r = qbm::grad::grad(model::ThermalModel::thermalize(h), rho, objective_for(q));
  CHECK(close(r.values, oracle_gradient(h, rho.matrix(), q), 1e-6, 1e-8));
  CHECK(close(r.values, r.first_terms - r.q_factor * r.second_terms, 0.0, 1e-15));
}

TEST_CASE("gradient for a rank-deficient target") {
  std::mt19937_64 rng(7);
  const auto h = instances::random_generic({4, 2}, 3, rng);
  const QuantumState rho = random_state(4, rng, 1);
  for (double q : {1.0, 0.5, 1.5}) {
    const GradientReport r = qbm::grad::grad(model::ThermalModel::thermalize(h), rho, objective_for(q));
    CHECK(close(r.values, oracle_gradient(h, rho.matrix(), q), 1e-6, 1e-8));
  }
}

TEST_CASE("single qubit gradients in closed form") {
  const model::ParamHamiltonian h0({2, 1}, {pauli_z()}, RVector::Zero(1));
  CVector zero(2);
  zero << 1.0, 0.0;
  const GradientReport pure = qbm::grad::grad(model::ThermalModel::thermalize(h0), QuantumState::pure(zero), Objective::umegaki());
  CHECK_THAT(pure.values(0), WithinAbs(1.0, 1e-14));

  // Commuting case: <Z>_rho - <Z>_sigma with <Z>_sigma = -tanh(theta).
  RVector p(2);
  p << 0.8, 0.2;
  for (double theta : {-0.7, 0.0, 0.4}) {
    const auto h = h0.with_theta(RVector::Constant(1, theta));
    const GradientReport r = qbm::grad::grad(model::ThermalModel::thermalize(h), QuantumState::diagonal(p), Objective::umegaki());
    CHECK_THAT(r.values(0), WithinAbs(0.6 + std::tanh(theta), 1e-14));
  }
}

TEST_CASE("gradient vanishes when the target is the model marginal") {
  const int seed = GENERATE(range(0, 4));
  std::mt19937_64 rng(200 + seed);
  const auto h = instances::random_generic({3, 2}, 4, rng);
  const model::ThermalModel m = model::ThermalModel::thermalize(h);
  const QuantumState rho(HermitianOperator::from_computed(m.sigma_v()));
  for (double q : {1.0, 0.5, 2.0}) CHECK(qbm::grad::grad(m, rho, objective_for(q)).values.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("qc gradients equal the generic gradients") {
  const int seed = GENERATE(range(0, 5));
  const double q = GENERATE(1.0, 0.5, 1.5);
  std::mt19937_64 rng(300 + seed);
  const auto inst = instances::random_qc({2 + seed % 2, 2}, 3, rng);
  const QuantumState rho = random_state(inst.hamiltonian.dims().visible, rng);
  const GradientReport a = grad_qc(model::qc_decompose(inst.hamiltonian, inst.basis), rho, objective_for(q));
  const GradientReport b = qbm::grad::grad(model::ThermalModel::thermalize(inst.hamiltonian), rho, objective_for(q));
  CHECK(close(a.values, b.values, 0.0, 1e-10));
}

TEST_CASE("cq gradients equal the generic gradients") {
  const int seed = GENERATE(range(0, 5));
  const double q = GENERATE(1.0, 0.5, 1.5);
  std::mt19937_64 rng(400 + seed);
  const BipartiteDims dims{2 + seed % 2, 2};
  const auto inst = instances::random_cq(dims, 3, rng);
  const RVector r = instances::random_probabilities(dims.visible, rng);
  const QuantumState rho(HermitianOperator::from_computed(
      inst.basis * r.cast<Complex>().asDiagonal() * inst.basis.adjoint()));
  const GradientReport a = grad_cq(model::cq_decompose(inst.hamiltonian, inst.basis), r, objective_for(q));
  const GradientReport b = qbm::grad::grad(model::ThermalModel::thermalize(inst.hamiltonian), rho, objective_for(q));
  CHECK(close(a.values, b.values, 0.0, 1e-10));
}

TEST_CASE("cq target validation") {
  std::mt19937_64 rng(5);
  const auto inst = instances::random_cq({2, 2}, 2, rng);
  const auto cq = model::cq_decompose(inst.hamiltonian, inst.basis);
  RVector bad(2);
  bad << 0.7, 0.2;
  CHECK_THROWS_AS(grad_cq(cq, bad, Objective::umegaki()), InputError);
  bad << 1.2, -0.2;
  CHECK_THROWS_AS(grad_cq(cq, bad, Objective::umegaki()), InputError);
  CHECK_THROWS_AS(grad_cq(cq, RVector::Constant(3, 1.0 / 3), Objective::umegaki()), InputError);
}

TEST_CASE("restricted gradients match finite differences") {
  const int seed = GENERATE(range(0, 3));
  std::mt19937_64 rng(500 + seed);
  model::RestrictedSpec spec;
  for (int i = 0; i < 2; ++i) spec.visible_ops.push_back(HermitianOperator::from_computed(random_hermitian(3, rng)));
  spec.hidden_ops.push_back(pauli_z());
  RVector hx(2);
  hx << 0.3, -0.6;
  spec.hidden_ops.push_back(HermitianOperator::diagonal(hx));
  std::normal_distribution<double> n(0.0, 0.4);
  spec.a = RVector::NullaryExpr(2, [&] { return n(rng); });
  spec.b = RVector::NullaryExpr(2, [&] { return n(rng); });
  spec.w = RMatrix::NullaryExpr(2, 2, [&] { return n(rng); });
  const auto h = model::restricted_to_param(spec);
  const QuantumState rho = random_state(3, rng);
  for (double q : {1.0, 1.5}) {
    const auto fq = restricted_grads(RestrictedKind::FullyQuantum, spec, CMatrix(), &rho, nullptr, objective_for(q));
    const auto fd = model::unpack_restricted(oracle_gradient(h, rho.matrix(), q), 2, 2);
    CHECK(close(fq.a, fd.a, 1e-6, 1e-8));
    CHECK(close(fq.b, fd.b, 1e-6, 1e-8));
    CHECK(close(fq.w.reshaped(), fd.w.reshaped(), 1e-6, 1e-8));
    // Hidden operators are diagonal, so the qc route applies in the computational basis.
    const auto qc = restricted_grads(RestrictedKind::QC, spec, CMatrix::Identity(2, 2), &rho, nullptr, objective_for(q));
    CHECK(close(qc.w.reshaped(), fq.w.reshaped(), 0.0, 1e-10));
    CHECK(close(qc.a, fq.a, 0.0, 1e-10));
  }
  CHECK_THROWS_AS(restricted_grads(RestrictedKind::CQ, spec, CMatrix::Identity(3, 3), nullptr, nullptr,
                                   Objective::umegaki()),
                  InputError);
}

TEST_CASE("classical gradient matches finite differences of the marginal divergence") {
  const int seed = GENERATE(range(0, 5));
  std::mt19937_64 rng(600 + seed);
  const auto table = instances::random_table(4, 3, 5, rng);
  const RVector target = instances::random_probabilities(4, rng);
  const RVector theta = RVector::NullaryExpr(5, [&] { return std::normal_distribution<double>(0.0, 0.5)(rng); });
  const auto divergence = [&](const RVector& t) {
    const RMatrix p = model::classical_joint(table, t);
    const RVector pv = p.rowwise().sum();
    double d = 0.0;
    for (int v = 0; v < 4; ++v) d += target(v) * std::log(target(v) / pv(v));
    return d;
  };
  const RVector g = classical_gradient(table, theta, target);
  for (int j = 0; j < 5; ++j) {
    RVector tp = theta;
    RVector tm = theta;
    tp(j) += 1e-5;
    tm(j) -= 1e-5;
    CHECK_THAT(g(j), WithinAbs((divergence(tp) - divergence(tm)) / 2e-5, 1e-8));
  }
  CHECK_THAT(classical_objective(table, theta, target), WithinAbs(divergence(theta), 1e-13));
}

TEST_CASE("classical divergence support") {
  RVector r(2);
  r << 0.5, 0.5;
  RVector p(2);
  p << 1.0, 0.0;
  CHECK_THROWS_AS(classical_divergence(r, p, Objective::umegaki()), NumericalError);
  CHECK_THAT(classical_divergence(p, r, Objective::umegaki()), WithinAbs(std::log(2.0), 1e-15));
}

TEST_CASE("pretty good measurement is a POVM") {
  const int seed = GENERATE(range(0, 4));
  std::mt19937_64 rng(700 + seed);
  const auto inst = instances::random_qc({3, 2 + seed % 2}, 3, rng);
  const auto qc = model::qc_decompose(inst.hamiltonian, inst.basis);
  const auto povm = pgm_povm(qc);
  CMatrix sum = CMatrix::Zero(3, 3);
  for (const auto& e : povm) {
    sum += e.matrix();
    CHECK(eigh(e).min() > -1e-12);
  }
  CHECK((sum - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  // On the model marginal the outcome law is the hidden weight vector.
  const QuantumState sv(HermitianOperator::from_computed(qc.sigma_v));
  CHECK((povm_probabilities(povm, sv) - qc.weights).cwiseAbs().maxCoeff() < 1e-10);
}
