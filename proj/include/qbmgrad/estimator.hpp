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
#include <functional>
#include <random>
#include <vector>

#include "qbmgrad/densities.hpp"
#include "qbmgrad/linalg.hpp"
#include "qbmgrad/model.hpp"

namespace qbm::estimator {

// Unitary whose top-left block (ancilla in |0>) times alpha approximates a
// target operator to within delta in spectral norm. The ancilla is the
// leading tensor factor: index = ancilla * system_dim + system.
struct BlockEncoding {
  CMatrix unitary;
  double alpha = 1.0;
  int ancillas = 1;
  double delta = 0.0;

  int system_dim() const { return static_cast<int>(unitary.rows()) >> ancillas; }
  // alpha times the ancilla-|0> block.
  CMatrix encoded() const;
  // Block (out, in) of the ancilla indices; single-ancilla encodings only.
  CMatrix block(int out, int in) const;
};

// Exact one-ancilla unitary dilation [[C, sqrt(I - C C^+)], [sqrt(I - C^+ C), -C^+]]
// of a contraction C, recorded with the given normalization alpha.
BlockEncoding dilate(const CMatrix& contraction, double alpha);

// sigma_v^{-i s / 2}, alpha = 1.
BlockEncoding modular_unitary(const model::ThermalModel& m, double s);
// sigma_v^{-1/2} / sqrt(kappa), alpha = sqrt(kappa).
BlockEncoding inv_sqrt_encoding(const model::ThermalModel& m);

inline constexpr int kMaxCircuitDim = 256;

// Expectation of X_control (x) O on the output of the swap-test circuit run
// with time parameters (s, t), rescaled by (alpha_1 alpha_2)^2. Registers are
// control, v1, a1, a2, v2, h; O = I_v1 (x) |00><00|_a (x) e^{iGt} G_j e^{-iGt}.
double circuit_expectation(const model::ThermalModel& m, const QuantumState& rho,
                           const HermitianOperator& gj, double s, double t);
double circuit_expectation(const model::ThermalModel& m, const QuantumState& rho,
                           const HermitianOperator& gj, double t, const BlockEncoding& modular,
                           const BlockEncoding& inv_sqrt);

// (1/2) Tr[e^{iGt} G_j e^{-iGt} {sigma_vh, sigma_v^{-1/2} sigma_v^{-is/2} rho
// sigma_v^{is/2} sigma_v^{-1/2} (x) I_h}], the quantity the circuit estimates.
double transformed_trace(const model::ThermalModel& m, const QuantumState& rho,
                         const HermitianOperator& gj, double s, double t);

// Average of circuit_expectation over s ~ logistic and t ~ high-peak tent by
// product quadrature. Equals the exact first gradient term up to quadrature
// and truncation error.
double averaged_circuit_expectation(const model::ThermalModel& m, const QuantumState& rho,
                                    const HermitianOperator& gj);
// Same average with encodings supplied per s by the caller.
double averaged_circuit_expectation(
    const model::ThermalModel& m, const QuantumState& rho, const HermitianOperator& gj,
    const std::function<BlockEncoding(double)>& modular, const BlockEncoding& inv_sqrt);

// Joint distribution of the control outcome z and the eigenvalue g of G_j
// (restricted to the ancilla-|00> subspace) for one circuit run.
struct OutcomeTable {
  std::vector<double> eigenvalues;  // distinct eigenvalues of G_j, then 0
  std::vector<double> prob_z0;
  std::vector<double> prob_z1;
};

// Full state-vector-level simulation of the registers.
OutcomeTable register_outcomes(const model::ThermalModel& m, const QuantumState& rho,
                               const HermitianOperator& gj, double t,
                               const BlockEncoding& modular, const BlockEncoding& inv_sqrt);

struct ShotRecord {
  double s = 0.0;
  double t = 0.0;
  int z = 0;
  double g = 0.0;
  double y = 0.0;  // (-1)^z g
};

// Precomputed data for repeated single-shot sampling of one (model, rho, G_j).
class ShotSampler {
 public:
  ShotSampler(const model::ThermalModel& m, const QuantumState& rho, const HermitianOperator& gj);

  // Exact outcome distribution at fixed (s, t) with exact encodings.
  OutcomeTable outcomes(double s, double t) const;
  OutcomeTable outcomes(double t, const BlockEncoding& modular,
                        const BlockEncoding& inv_sqrt) const;
  ShotRecord shot(std::mt19937_64& rng) const;
  // Single draw of G_j measured on sigma_vh.
  double second_term_shot(std::mt19937_64& rng) const;

  double kappa() const { return kappa_; }
  double g_norm() const { return g_norm_; }

 private:
  OutcomeTable outcomes_from(const CMatrix& x, const CMatrix& tau, double t) const;

  CMatrix sigma_vh_;
  CMatrix sigma_h_;
  CMatrix rho_;
  int dv_;
  int dh_;
  double kappa_;
  double g_norm_;
  std::vector<double> levels_;
  std::vector<std::vector<int>> level_members_;
  CMatrix g_vectors_;       // eigenvectors of G (columns)
  RVector g_values_;
  CMatrix overlap_;         // eigvecs(G_j)^+ eigvecs(G)
  RVector level_prob_vh_;   // Tr[Pi_g sigma_vh]
  SpectralDecomposition sv_;
  BlockEncoding inv_sqrt_;
  SeededSampler s_sampler_;
  SeededSampler t_sampler_;
};

ShotRecord shot_sample(const ShotSampler& sampler, std::mt19937_64& rng);

// M = ceil(2 (kappa g / eps)^2 ln(2 / delta)).
std::uint64_t hoeffding_shots(double kappa, double g_norm, double epsilon, double delta);

struct EstimatorConfig {
  double epsilon = 0.05;
  double delta = 0.05;
  std::uint64_t shots = 0;  // 0 selects the Hoeffding count
  std::uint64_t seed = 0;
  int threads = 1;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t shots = 0;
  double kappa = 0.0;
  double g_norm = 0.0;
};

// kappa * mean of (-1)^z g over independent circuit runs.
Estimate estimate_first_term(const model::ThermalModel& m, const QuantumState& rho,
                             const HermitianOperator& gj, const EstimatorConfig& cfg);
Estimate estimate_first_term(const ShotSampler& sampler, const EstimatorConfig& cfg);
// Mean of G_j outcomes measured on sigma_vh.
Estimate estimate_second_term(const ShotSampler& sampler, const EstimatorConfig& cfg);

// Shots are processed in fixed-size chunks seeded by seed XOR chunk index, so
// results do not depend on the number of worker threads.
inline constexpr std::uint64_t kShotChunk = 4096;

// Error bookkeeping for block encodings.
struct EncodingMeta {
  double alpha = 1.0;
  int ancillas = 0;
  double delta = 0.0;
};

// (alpha, a, delta) x (beta, b, eps) -> (alpha beta, a + b, alpha eps + beta delta + delta eps)
EncodingMeta be_product(const EncodingMeta& a, const EncodingMeta& b);

// Trace-distance error of the transformed target state given modular-flow
// error eps1 and inverse-square-root error eps2, times ||G_j||:
//   g (2 sqrt(kappa) eps2 + 2 eps1 (kappa + sqrt(kappa) eps2)).
double error_budget(double eps1, double eps2, double kappa, double g_norm);

struct BudgetSplit {
  double eps1 = 0.0;
  double eps2 = 0.0;
};

// Allocation with error_budget(eps1, eps2) = eps / 2.
BudgetSplit budget_split(double epsilon, double kappa, double g_norm);

enum class QueryKind { ModularFlow, InvSqrt, FullAlgorithm };

// Asymptotic query counts with unit constants.
double query_cost(QueryKind kind, double kappa, double s, double g_norm, double epsilon,
                  double delta);

}  // namespace qbm::estimator
