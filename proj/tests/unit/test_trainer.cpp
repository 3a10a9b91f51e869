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

#include "catch_amalgamated.hpp"
#include "qbmgrad/errors.hpp"
#include "qbmgrad/instances.hpp"
#include "qbmgrad/trainer.hpp"

using namespace qbm;
using namespace qbm::train;
using Catch::Matchers::WithinAbs;

namespace {

HermitianOperator pauli_z() {
  RVector d(2);
  d << 1.0, -1.0;
  return HermitianOperator::diagonal(d);
}

Problem benchmark(double theta0 = 0.0) {
  RVector p(2);
  p << 0.8, 0.2;
  return Problem::generic(model::ParamHamiltonian({2, 1}, {pauli_z()}, RVector::Constant(1, theta0)),
                          QuantumState::diagonal(p));
}

bool monotone(const Trajectory& t) {
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (t.rows[i].objective > t.rows[i - 1].objective) return false;
  return true;
}

}  // namespace

TEST_CASE("benchmark converges to the closed-form optimum") {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.iterations = 2000;
  const Trajectory t = qbm::train::train(benchmark(), cfg);
  CHECK(t.status == Trajectory::Status::Completed);
  CHECK(t.last().iter == 2000);
  CHECK(t.last().objective < 1e-8);
  CHECK_THAT(t.last().theta(0), WithinAbs(0.5 * std::log(0.25), 1e-4));
  CHECK(monotone(t));
  CHECK(t.rows.size() == 2001);
}

TEST_CASE("objective is non-increasing for every problem kind") {
  const int seed = GENERATE(range(0, 3));
  std::mt19937_64 rng(seed);
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.iterations = 60;
  const auto generic = instances::random_generic({3, 2}, 4, rng);
  const auto qc = instances::random_qc({2, 2}, 3, rng);
  const auto cq = instances::random_cq({3, 2}, 3, rng);
  const auto table = instances::random_table(3, 2, 4, rng);
  const std::vector<Problem> problems = {
      Problem::generic(generic, random_state(3, rng)),
      Problem::qc(qc.hamiltonian, qc.basis, random_state(2, rng)),
      Problem::cq(cq.hamiltonian, cq.basis, instances::random_probabilities(3, rng)),
      Problem::classical(table, RVector::Zero(4), instances::random_probabilities(3, rng)),
  };
  for (const Problem& p : problems) {
    for (double q : {1.0, 1.5}) {
      cfg.objective = q == 1.0 ? grad::Objective::umegaki() : grad::Objective::petz_tsallis(q);
      const Trajectory t = qbm::train::train(p, cfg);
      CHECK(monotone(t));
      CHECK(t.last().objective < t.rows.front().objective);
    }
  }
}

TEST_CASE("analytic gradients agree with finite differences of the objective") {
  std::mt19937_64 rng(17);
  const auto cq = instances::random_cq({2, 3}, 3, rng);
  const Problem p = Problem::cq(cq.hamiltonian, cq.basis, instances::random_probabilities(2, rng));
  for (double q : {1.0, 0.5, 2.0}) {
    const auto obj = q == 1.0 ? grad::Objective::umegaki() : grad::Objective::petz_tsallis(q);
    const RVector a = p.gradient(p.initial_theta(), obj).values;
    const RVector fd = finite_diff_gradient(p, p.initial_theta(), obj);
    CHECK((a - fd).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK_THROWS_AS(finite_diff_gradient(p, p.initial_theta(), grad::Objective::umegaki(), 1e-2), InputError);
  CHECK_THROWS_AS(finite_diff_gradient(p, p.initial_theta(), grad::Objective::umegaki(), 1e-8), InputError);
}

TEST_CASE("log_every thins the trajectory but keeps the last row") {
  TrainConfig cfg;
  cfg.iterations = 25;
  cfg.log_every = 10;
  const Trajectory t = qbm::train::train(benchmark(), cfg);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].iter == 0);
  CHECK(t.rows[1].iter == 10);
  CHECK(t.rows[2].iter == 20);
  CHECK(t.rows[3].iter == 25);
  cfg.log_every = 0;
  CHECK_THROWS_AS(qbm::train::train(benchmark(), cfg), InputError);
}

TEST_CASE("gradient tolerance stops early") {
  TrainConfig cfg;
  cfg.iterations = 5000;
  cfg.grad_tolerance = 1e-6;
  const Trajectory t = qbm::train::train(benchmark(), cfg);
  CHECK(t.status == Trajectory::Status::Converged);
  CHECK(t.last().grad_norm < 1e-6);
  CHECK(t.last().iter < 5000);
}

TEST_CASE("runs are reproducible") {
  TrainConfig cfg;
  cfg.iterations = 30;
  cfg.mode = GradientMode::Shot;
  cfg.estimator.shots = 500;
  cfg.estimator.seed = 4;
  const Trajectory a = qbm::train::train(benchmark(), cfg);
  const Trajectory b = qbm::train::train(benchmark(), cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].objective == b.rows[i].objective);
    CHECK(a.rows[i].grad_norm == b.rows[i].grad_norm);
    CHECK(a.rows[i].theta == b.rows[i].theta);
  }
}

TEST_CASE("oversized steps are absorbed by the line search") {
  TrainConfig cfg;
  cfg.learning_rate = 1e4;
  cfg.iterations = 40;
  const Trajectory t = qbm::train::train(benchmark(), cfg);
  CHECK(t.status == Trajectory::Status::Completed);
  CHECK(monotone(t));
  CHECK(t.last().objective < 1e-6);
}

TEST_CASE("a start outside the exponent guard is a numerical error") {
  TrainConfig cfg;
  CHECK_THROWS_AS(qbm::train::train(benchmark(800.0), cfg), NumericalError);
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(qbm::train::train(benchmark(), cfg), InputError);
}

TEST_CASE("shot-mode training approaches the optimum") {
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.iterations = 40;
  cfg.mode = GradientMode::Shot;
  cfg.estimator.shots = 4000;
  cfg.estimator.seed = 99;
  const Trajectory t = qbm::train::train(benchmark(), cfg);
  CHECK(monotone(t));
  CHECK(std::abs(t.last().theta(0) - 0.5 * std::log(0.25)) < 0.1);
  cfg.objective = grad::Objective::petz_tsallis(1.5);
  CHECK_THROWS_AS(qbm::train::train(benchmark(), cfg), InputError);
}

TEST_CASE("shot gradients concentrate on the exact gradient") {
  std::mt19937_64 rng(23);
  const auto h = instances::random_generic({2, 2}, 2, rng);
  const Problem p = Problem::generic(h, random_state(2, rng));
  estimator::EstimatorConfig cfg;
  cfg.shots = 20000;
  cfg.seed = 8;
  const RVector exact = p.gradient(h.theta(), grad::Objective::umegaki()).values;
  const RVector shot = p.shot_gradient(h.theta(), grad::Objective::umegaki(), cfg);
  // kappa |G_j| / sqrt(M) per term, with room for five standard deviations.
  const double kappa = model::ThermalModel::thermalize(h).kappa();
  for (int j = 0; j < 2; ++j) {
    const double scale = kappa * norms(h.terms()[j]).spectral / std::sqrt(20000.0);
    CHECK(std::abs(shot(j) - exact(j)) < 5.0 * scale);
  }
}

TEST_CASE("classical Monte Carlo gradient") {
  const int seed = GENERATE(range(0, 3));
  std::mt19937_64 rng(40 + seed);
  const auto table = instances::random_table(4, 2, 3, rng);
  const RVector target = instances::random_probabilities(4, rng);
  const RVector theta = RVector::Constant(3, 0.3);
  const MonteCarloGradient mc = classical_gradient_mc(table, theta, target, 50000, 10 + seed);
  const RVector exact = grad::classical_gradient(table, theta, target);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(mc.mean(j) - exact(j)) < 4.0 * mc.std_error(j) + 1e-12);
  CHECK_THROWS_AS(classical_gradient_mc(table, theta, target, 1, 0), InputError);
}
