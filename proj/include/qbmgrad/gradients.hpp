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

#include <string>
#include <vector>

#include "qbmgrad/linalg.hpp"
#include "qbmgrad/matcalc.hpp"
#include "qbmgrad/model.hpp"

namespace qbm::grad {

inline constexpr double kSupportTol = 1e-12;

// Umegaki relative entropy D(rho || sigma) = Tr[rho (ln rho - ln sigma)] or
// the Petz-Tsallis divergence (Tr[rho^q sigma^{1-q}] - 1) / (q - 1).
struct Objective {
  enum class Kind { Umegaki, PetzTsallis };
  Kind kind = Kind::Umegaki;
  double q = 1.0;

  static Objective umegaki() { return {}; }
  static Objective petz_tsallis(double q);

  bool is_umegaki() const { return kind == Kind::Umegaki; }
  std::string name() const;
};

// grad_j = first_j - q_factor * second_j, with
//   first_j  = Tr[G_j S(rho)]          (S the transformed target)
//   second_j = Tr[G_j sigma_vh]
// and q_factor = Tr[rho^q sigma_v^{1-q}] (1 for Umegaki).
struct GradientReport {
  RVector values;
  RVector first_terms;
  RVector second_terms;
  double q_factor = 1.0;
};

double relative_entropy(const QuantumState& rho, const CMatrix& sigma, const Objective& obj);
double relative_entropy(const QuantumState& rho, const QuantumState& sigma, const Objective& obj);

// Classical divergences between probability vectors.
double classical_divergence(const RVector& r, const RVector& p, const Objective& obj);

// rho^q with negative eigenvalues clamped to zero.
CMatrix state_power(const QuantumState& rho, double q);

// Maps a visible-space operator X to the joint operator whose G_j
// expectations give the first gradient term:
//   exp-tent channel of G applied to
//   (1/2){sigma_vh, sigma_v^{-q/2} U(X) sigma_v^{-q/2} (x) I_h},
// with U the log-logistic channel of sigma_v (q = 1) or the power-beta
// channel with r = 1 - q. For q != 1 callers pass X = rho^q.
HermitianOperator sigma_map(const model::ThermalModel& m, const HermitianOperator& x,
                            double q = 1.0,
                            const matcalc::EvalMode& mode = matcalc::EvalMode::spectral());

GradientReport grad(const model::ThermalModel& m, const QuantumState& rho, const Objective& obj);

GradientReport grad_qc(const model::QCModel& m, const QuantumState& rho, const Objective& obj);
// target: distribution over the visible basis of the model.
GradientReport grad_cq(const model::CQModel& m, const RVector& target, const Objective& obj);

// Pretty-good measurement built from the block states of a QC model:
// Lambda_x = U(sigma_v^{-1/2} p_x sigma_v^x sigma_v^{-1/2}).
std::vector<HermitianOperator> pgm_povm(const model::QCModel& m);
RVector povm_probabilities(const std::vector<HermitianOperator>& povm, const QuantumState& rho);

enum class RestrictedKind { FullyQuantum, QC, CQ };

// Gradient of the restricted model with respect to (a, b, w). basis is the
// hidden basis for QC, the visible basis for CQ, and ignored otherwise.
// target_state is used for FullyQuantum / QC, target_probs for CQ.
model::RestrictedGradient restricted_grads(RestrictedKind kind, const model::RestrictedSpec& spec,
                                           const CMatrix& basis, const QuantumState* target_state,
                                           const RVector* target_probs, const Objective& obj);

// Exact classical gradient by enumeration:
//   sum_v q(v) sum_h p(h|v) G_j(v, h) - sum_{v,h} p(v, h) G_j(v, h).
RVector classical_gradient(const model::EnergyTable& table, const RVector& theta,
                           const RVector& target);
double classical_objective(const model::EnergyTable& table, const RVector& theta,
                           const RVector& target);

}  // namespace qbm::grad
