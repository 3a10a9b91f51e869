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

#include <cstdint>
#include <string>
#include <vector>

#include "qbmgrad/estimator.hpp"
#include "qbmgrad/gradients.hpp"
#include "qbmgrad/model.hpp"

namespace qbm::train {

// A model family paired with its target.
class Problem {
 public:
  enum class Kind { Generic, QC, CQ, Classical };

  static Problem generic(model::ParamHamiltonian h, QuantumState target);
  static Problem qc(model::ParamHamiltonian h, CMatrix hidden_basis, QuantumState target);
  static Problem cq(model::ParamHamiltonian h, CMatrix visible_basis, RVector target);
  static Problem classical(model::EnergyTable table, RVector theta, RVector target);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  int num_params() const { return static_cast<int>(theta0_.size()); }
  const RVector& initial_theta() const { return theta0_; }
  const model::ParamHamiltonian& hamiltonian() const { return h_; }
  const QuantumState& target_state() const { return target_state_; }
  const RVector& target_probs() const { return target_probs_; }
  const CMatrix& basis() const { return basis_; }
  const model::EnergyTable& table() const { return table_; }

  double objective(const RVector& theta, const grad::Objective& obj) const;
  grad::GradientReport gradient(const RVector& theta, const grad::Objective& obj) const;
  // Gradient from sampled measurement outcomes.
  RVector shot_gradient(const RVector& theta, const grad::Objective& obj,
                        const estimator::EstimatorConfig& cfg) const;

 private:
  Kind kind_ = Kind::Generic;
  model::ParamHamiltonian h_;
  CMatrix basis_;
  QuantumState target_state_;
  RVector target_probs_;
  model::EnergyTable table_;
  RVector theta0_;
};

RVector finite_diff_gradient(const Problem& p, const RVector& theta, const grad::Objective& obj,
                             double step = 1e-5);

enum class GradientMode { Exact, Shot };

struct TrainConfig {
  double learning_rate = 0.1;
  int iterations = 200;
  int max_halvings = 20;
  int log_every = 1;  // rows are kept for every log_every-th iteration and the last one
  double grad_tolerance = 0.0;  // stop once the gradient norm falls below this
  GradientMode mode = GradientMode::Exact;
  grad::Objective objective;
  estimator::EstimatorConfig estimator;
};

struct TrajectoryRow {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  RVector theta;
  double wall_ms = 0.0;
  int halvings = 0;
};

struct Trajectory {
  enum class Status { Completed, Converged, Diverged };
  std::vector<TrajectoryRow> rows;
  Status status = Status::Completed;
  std::string message;

  const TrajectoryRow& last() const { return rows.back(); }
  std::string status_name() const;
};

inline constexpr double kDivergenceLimit = 1e6;

// Gradient descent with per-step halving whenever the objective would rise.
Trajectory train(const Problem& p, const TrainConfig& cfg);

// Classical Boltzmann machine training, exact or Monte Carlo gradients.
Trajectory train_classical(const model::EnergyTable& table, const RVector& theta0,
                           const RVector& target, const TrainConfig& cfg);

// Monte Carlo estimate of the classical gradient with per-component standard
// errors; `samples` draws for each of the two terms.
struct MonteCarloGradient {
  RVector mean;
  RVector std_error;
};
MonteCarloGradient classical_gradient_mc(const model::EnergyTable& table, const RVector& theta,
                                         const RVector& target, std::uint64_t samples,
                                         std::uint64_t seed);

}  // namespace qbm::train
