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

#include "qbmgrad/trainer.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "qbmgrad/errors.hpp"

namespace qbm::train {

namespace {

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;

// Discrete outcome distribution of an observable measured on a state.
struct Measurement {
  std::vector<double> values;
  std::vector<double> probs;

  double draw(std::mt19937_64& rng) const {
    double u = open_uniform(rng);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (u < probs[i]) return values[i];
      u -= probs[i];
    }
    return values.back();
  }
};

Measurement measurement(const CMatrix& obs, const CMatrix& state) {
  const SpectralDecomposition s = eigh(HermitianOperator::from_computed(obs));
  const CMatrix rotated = s.to_eigenbasis(state);
  Measurement m;
  double total = 0.0;
  for (int i = 0; i < s.dim(); ++i) {
    m.values.push_back(s.values(i));
    m.probs.push_back(std::max(0.0, rotated(i, i).real()));
    total += m.probs.back();
  }
  for (double& p : m.probs) p /= total;
  return m;
}

int draw_index(const RVector& probs, std::mt19937_64& rng) {
  double u = open_uniform(rng) * probs.sum();
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (u < probs(i)) return static_cast<int>(i);
    u -= probs(i);
  }
  return static_cast<int>(probs.size() - 1);
}

std::uint64_t direct_shots(const estimator::EstimatorConfig& cfg, double g_norm) {
  if (cfg.shots > 0) return cfg.shots;
  return estimator::hoeffding_shots(1.0, std::max(g_norm, 1e-300), cfg.epsilon, cfg.delta);
}

// Classical-visible gradient report shared by the CQ and classical families:
// blocks indexed by x with weights p_x and block expectations e_x[j].
grad::GradientReport weighted_report(const RVector& r, const RVector& p, const RMatrix& e,
                                     const grad::Objective& obj) {
  const int n = static_cast<int>(e.cols());
  grad::GradientReport out;
  out.first_terms = RVector::Zero(n);
  out.second_terms = RVector::Zero(n);
  out.q_factor = obj.is_umegaki() ? 1.0 : 0.0;
  for (Eigen::Index x = 0; x < r.size(); ++x) {
    if (r(x) > 0.0 && !(p(x) > 0.0)) throw NumericalError("target outside model support");
    double w = r(x);
    if (!obj.is_umegaki()) {
      w = r(x) > 0.0 ? std::pow(r(x), obj.q) * std::pow(p(x), 1.0 - obj.q) : 0.0;
      out.q_factor += w;
    }
    out.first_terms += w * e.row(x).transpose();
    out.second_terms += p(x) * e.row(x).transpose();
  }
  out.values = out.first_terms - out.q_factor * out.second_terms;
  return out;
}

}  // namespace

Problem Problem::generic(model::ParamHamiltonian h, QuantumState target) {
  if (target.dim() != h.dims().visible) throw InputError("target must act on the visible space");
  Problem p;
  p.kind_ = Kind::Generic;
  p.theta0_ = h.theta();
  p.h_ = std::move(h);
  p.target_state_ = std::move(target);
  return p;
}

Problem Problem::qc(model::ParamHamiltonian h, CMatrix hidden_basis, QuantumState target) {
  if (target.dim() != h.dims().visible) throw InputError("target must act on the visible space");
  model::qc_decompose(h, hidden_basis);
  Problem p;
  p.kind_ = Kind::QC;
  p.theta0_ = h.theta();
  p.h_ = std::move(h);
  p.basis_ = std::move(hidden_basis);
  p.target_state_ = std::move(target);
  return p;
}

Problem Problem::cq(model::ParamHamiltonian h, CMatrix visible_basis, RVector target) {
  model::cq_decompose(h, visible_basis);
  if (target.size() != h.dims().visible) throw InputError("target distribution size mismatch");
  Problem p;
  p.kind_ = Kind::CQ;
  p.theta0_ = h.theta();
  p.h_ = std::move(h);
  p.basis_ = std::move(visible_basis);
  p.target_probs_ = std::move(target);
  return p;
}

Problem Problem::classical(model::EnergyTable table, RVector theta, RVector target) {
  table.validate();
  if (theta.size() != table.num_params()) throw InputError("theta does not match energy terms");
  if (target.size() != table.visible) throw InputError("target distribution size mismatch");
  Problem p;
  p.kind_ = Kind::Classical;
  p.theta0_ = std::move(theta);
  p.table_ = std::move(table);
  p.target_probs_ = std::move(target);
  return p;
}

std::string Problem::kind_name() const {
  switch (kind_) {
    case Kind::Generic:
      return "generic";
    case Kind::QC:
      return "qc";
    case Kind::CQ:
      return "cq";
    case Kind::Classical:
      return "classical";
  }
  return "unknown";
}

double Problem::objective(const RVector& theta, const grad::Objective& obj) const {
  switch (kind_) {
    case Kind::Generic:
    case Kind::QC: {
      const auto m = model::ThermalModel::thermalize(h_.with_theta(theta));
      return grad::relative_entropy(target_state_, m.sigma_v(), obj);
    }
    case Kind::CQ: {
      const auto m = model::cq_decompose(h_.with_theta(theta), basis_);
      return grad::classical_divergence(target_probs_, m.weights, obj);
    }
    case Kind::Classical: {
      const RVector pv = model::classical_joint(table_, theta).rowwise().sum();
      return grad::classical_divergence(target_probs_, pv, obj);
    }
  }
  return 0.0;
}

grad::GradientReport Problem::gradient(const RVector& theta, const grad::Objective& obj) const {
  switch (kind_) {
    case Kind::Generic:
      return grad::grad(model::ThermalModel::thermalize(h_.with_theta(theta)), target_state_, obj);
    case Kind::QC:
      return grad::grad_qc(model::qc_decompose(h_.with_theta(theta), basis_), target_state_, obj);
    case Kind::CQ:
      return grad::grad_cq(model::cq_decompose(h_.with_theta(theta), basis_), target_probs_, obj);
    case Kind::Classical: {
      const RMatrix p = model::classical_joint(table_, theta);
      const RVector pv = p.rowwise().sum();
      RMatrix e(table_.visible, table_.num_params());
      for (int v = 0; v < table_.visible; ++v)
        for (int j = 0; j < table_.num_params(); ++j)
          e(v, j) = p.row(v).dot(table_.terms[j].row(v)) / pv(v);
      return weighted_report(target_probs_, pv, e, obj);
    }
  }
  return {};
}

RVector Problem::shot_gradient(const RVector& theta, const grad::Objective& obj,
                               const estimator::EstimatorConfig& cfg) const {
  if (!obj.is_umegaki()) throw InputError("shot mode supports the Umegaki objective only");
  const int n = num_params();
  RVector out(n);
  switch (kind_) {
    case Kind::Generic:
    case Kind::QC: {
      const auto m = model::ThermalModel::thermalize(h_.with_theta(theta));
      for (int j = 0; j < n; ++j) {
        const estimator::ShotSampler sampler(m, target_state_, h_.terms()[j]);
        estimator::EstimatorConfig c = cfg;
        c.seed = cfg.seed + kSeedStride * (2 * j + 1);
        const double first = estimator::estimate_first_term(sampler, c).mean;
        c.seed = cfg.seed + kSeedStride * (2 * j + 2);
        const double second = estimator::estimate_second_term(sampler, c).mean;
        out(j) = first - second;
      }
      return out;
    }
    case Kind::CQ: {
      const auto m = model::cq_decompose(h_.with_theta(theta), basis_);
      for (int j = 0; j < n; ++j) {
        std::vector<Measurement> meas;
        double g_norm = 0.0;
        for (int x = 0; x < m.num_blocks(); ++x) {
          meas.push_back(measurement(m.block_terms[x][j], m.block_states[x]));
          for (double v : meas.back().values) g_norm = std::max(g_norm, std::abs(v));
        }
        const std::uint64_t shots = direct_shots(cfg, g_norm);
        std::mt19937_64 rng(cfg.seed + kSeedStride * (j + 1));
        double first = 0.0;
        double second = 0.0;
        for (std::uint64_t k = 0; k < shots; ++k) {
          first += meas[draw_index(target_probs_, rng)].draw(rng);
          second += meas[draw_index(m.weights, rng)].draw(rng);
        }
        out(j) = (first - second) / static_cast<double>(shots);
      }
      return out;
    }
    case Kind::Classical: {
      double g_norm = 0.0;
      for (const auto& t : table_.terms) g_norm = std::max(g_norm, t.cwiseAbs().maxCoeff());
      return classical_gradient_mc(table_, theta, target_probs_, direct_shots(cfg, g_norm),
                                   cfg.seed)
          .mean;
    }
  }
  return out;
}

RVector finite_diff_gradient(const Problem& p, const RVector& theta, const grad::Objective& obj,
                             double step) {
  if (!(step >= 1e-7 && step <= 1e-3)) throw InputError("finite-difference step must be in [1e-7, 1e-3]");
  RVector out(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    RVector plus = theta;
    RVector minus = theta;
    plus(j) += step;
    minus(j) -= step;
    out(j) = (p.objective(plus, obj) - p.objective(minus, obj)) / (2.0 * step);
  }
  return out;
}

std::string Trajectory::status_name() const {
  switch (status) {
    case Status::Completed:
      return "completed";
    case Status::Converged:
      return "converged";
    case Status::Diverged:
      return "diverged";
  }
  return "unknown";
}

Trajectory train(const Problem& p, const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (cfg.iterations < 0) throw InputError("iterations must be non-negative");
  if (cfg.log_every < 1) throw InputError("log_every must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&start] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };
  Trajectory traj;
  RVector theta = p.initial_theta();
  double f = p.objective(theta, cfg.objective);
  int halvings = 0;
  for (int iter = 0;; ++iter) {
    RVector g;
    if (cfg.mode == GradientMode::Exact) {
      g = p.gradient(theta, cfg.objective).values;
    } else {
      estimator::EstimatorConfig est = cfg.estimator;
      est.seed = cfg.estimator.seed + kSeedStride * static_cast<std::uint64_t>(iter) * 1024;
      g = p.shot_gradient(theta, cfg.objective, est);
    }
    const TrajectoryRow row{iter, f, g.norm(), theta, elapsed_ms(), halvings};
    const auto finish = [&](Trajectory::Status status) {
      if (traj.rows.empty() || traj.rows.back().iter != iter) traj.rows.push_back(row);
      traj.status = status;
      return traj;
    };
    if (iter % cfg.log_every == 0) traj.rows.push_back(row);
    if (!std::isfinite(f) || f > kDivergenceLimit || !g.allFinite()) {
      traj.message = "objective or gradient left the finite range at iteration " +
                     std::to_string(iter);
      return finish(Trajectory::Status::Diverged);
    }
    if (cfg.grad_tolerance > 0.0 && g.norm() < cfg.grad_tolerance) {
      return finish(Trajectory::Status::Converged);
    }
    if (iter >= cfg.iterations) return finish(Trajectory::Status::Completed);

    double eta = cfg.learning_rate;
    halvings = 0;
    bool accepted = false;
    for (; halvings <= cfg.max_halvings; ++halvings, eta *= 0.5) {
      const RVector trial = theta - eta * g;
      double ft;
      try {
        ft = p.objective(trial, cfg.objective);
      } catch (const NumericalError&) {
        continue;
      }
      if (std::isfinite(ft) && ft <= f) {
        theta = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) halvings = cfg.max_halvings + 1;
  }
}

Trajectory train_classical(const model::EnergyTable& table, const RVector& theta0,
                           const RVector& target, const TrainConfig& cfg) {
  return train(Problem::classical(table, theta0, target), cfg);
}

MonteCarloGradient classical_gradient_mc(const model::EnergyTable& table, const RVector& theta,
                                         const RVector& target, std::uint64_t samples,
                                         std::uint64_t seed) {
  if (samples < 2) throw InputError("Monte Carlo gradient needs at least two samples");
  const RMatrix p = model::classical_joint(table, theta);
  const RVector pv = p.rowwise().sum();
  RVector flat(p.size());
  for (int v = 0; v < table.visible; ++v)
    for (int h = 0; h < table.hidden; ++h) flat(v * table.hidden + h) = p(v, h);
  const int n = table.num_params();
  std::mt19937_64 rng(seed);
  RVector s1 = RVector::Zero(n), q1 = RVector::Zero(n);
  RVector s2 = RVector::Zero(n), q2 = RVector::Zero(n);
  for (std::uint64_t k = 0; k < samples; ++k) {
    const int v = draw_index(target, rng);
    const int h = draw_index(p.row(v).transpose() / pv(v), rng);
    const int joint = draw_index(flat, rng);
    const int v2 = joint / table.hidden;
    const int h2 = joint % table.hidden;
    for (int j = 0; j < n; ++j) {
      const double a = table.terms[j](v, h);
      const double b = table.terms[j](v2, h2);
      s1(j) += a;
      q1(j) += a * a;
      s2(j) += b;
      q2(j) += b * b;
    }
  }
  const double m = static_cast<double>(samples);
  MonteCarloGradient out;
  out.mean = (s1 - s2) / m;
  out.std_error.resize(n);
  for (int j = 0; j < n; ++j) {
    const double v1 = (q1(j) - s1(j) * s1(j) / m) / (m - 1.0);
    const double v2 = (q2(j) - s2(j) * s2(j) / m) / (m - 1.0);
    out.std_error(j) = std::sqrt(std::max(0.0, v1 + v2) / m);
  }
  return out;
}

}  // namespace qbm::train
