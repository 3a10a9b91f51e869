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

#include <vector>

#include "qbmgrad/linalg.hpp"

namespace qbm::model {

inline constexpr double kMaxExponentNorm = 700.0;
inline constexpr double kBlockTol = 1e-10;

// G(theta) = sum_j theta_j G_j on visible (x) hidden.
class ParamHamiltonian {
 public:
  ParamHamiltonian() = default;
  ParamHamiltonian(BipartiteDims dims, std::vector<HermitianOperator> terms, RVector theta);

  const BipartiteDims& dims() const { return dims_; }
  const std::vector<HermitianOperator>& terms() const { return terms_; }
  const RVector& theta() const { return theta_; }
  int num_params() const { return static_cast<int>(terms_.size()); }

  ParamHamiltonian with_theta(const RVector& theta) const;
  CMatrix hamiltonian() const;

 private:
  BipartiteDims dims_;
  std::vector<HermitianOperator> terms_;
  RVector theta_;
};

// Thermal state e^{-G} / Z of a parameterized Hamiltonian with its visible
// marginal and the spectral data reused by the gradient code.
class ThermalModel {
 public:
  static ThermalModel thermalize(const ParamHamiltonian& h);

  const ParamHamiltonian& param() const { return param_; }
  const BipartiteDims& dims() const { return param_.dims(); }
  const CMatrix& hamiltonian() const { return g_; }
  const SpectralDecomposition& g_spectrum() const { return g_spec_; }
  // Eigenvalues of sigma_vh in the eigenbasis of G.
  const RVector& boltzmann_weights() const { return weights_; }
  double log_partition() const { return log_z_; }
  double partition() const;
  const CMatrix& sigma_vh() const { return sigma_vh_; }
  const CMatrix& sigma_v() const { return sigma_v_; }
  const SpectralDecomposition& sigma_v_spectrum() const { return sigma_v_spec_; }
  // 1 / lambda_min(sigma_v); infinite when the marginal is singular.
  double kappa() const { return kappa_; }

 private:
  ParamHamiltonian param_;
  CMatrix g_;
  SpectralDecomposition g_spec_;
  RVector weights_;
  double log_z_ = 0.0;
  CMatrix sigma_vh_;
  CMatrix sigma_v_;
  SpectralDecomposition sigma_v_spec_;
  double kappa_ = 1.0;
};

// Restricted QBM: G = sum_i a_i V_i (x) I + sum_j b_j I (x) H_j
//                   + sum_ij w_ij V_i (x) H_j.
struct RestrictedSpec {
  RVector a;
  RVector b;
  RMatrix w;
  std::vector<HermitianOperator> visible_ops;
  std::vector<HermitianOperator> hidden_ops;

  int m() const { return static_cast<int>(visible_ops.size()); }
  int n() const { return static_cast<int>(hidden_ops.size()); }
  void validate() const;
};

struct RestrictedGradient {
  RVector a;
  RVector b;
  RMatrix w;
};

// theta is packed as (a, b, w row-major).
ParamHamiltonian restricted_to_param(const RestrictedSpec& spec);
RVector pack_restricted(const RVector& a, const RVector& b, const RMatrix& w);
RestrictedGradient unpack_restricted(const RVector& packed, int m, int n);

// Hamiltonian that is block diagonal in a fixed orthonormal basis of one
// subsystem. Blocks are indexed by the basis label x.
struct BlockModel {
  BipartiteDims dims;
  RVector theta;
  CMatrix basis;
  std::vector<std::vector<CMatrix>> block_terms;  // [x][j]
  std::vector<CMatrix> block_hamiltonians;        // [x]
  std::vector<SpectralDecomposition> block_spectra;
  std::vector<CMatrix> block_states;
  RVector weights;  // p_x

  int num_blocks() const { return static_cast<int>(block_terms.size()); }
  int num_params() const { return static_cast<int>(theta.size()); }
};

// Classical hidden units: blocks G_v^{j,x} on the visible space, indexed by
// the hidden basis label.
struct QCModel : BlockModel {
  CMatrix sigma_v;
  SpectralDecomposition sigma_v_spectrum;
  double kappa = 1.0;

  // sum_x block(x) (x) |x><x| for term j, or for G(theta) when j < 0.
  CMatrix reassemble(int j) const;
};

// Classical visible units: blocks G_h^{j,x} on the hidden space, indexed by
// the visible basis label.
struct CQModel : BlockModel {
  CMatrix reassemble(int j) const;
};

QCModel qc_decompose(const ParamHamiltonian& h, const CMatrix& hidden_basis);
CQModel cq_decompose(const ParamHamiltonian& h, const CMatrix& visible_basis);

// Classical Boltzmann machine: term j assigns energy G_j(v, h) to each
// configuration.
struct EnergyTable {
  int visible = 1;
  int hidden = 1;
  std::vector<RMatrix> terms;

  int num_params() const { return static_cast<int>(terms.size()); }
  void validate() const;
};

RMatrix classical_energy(const EnergyTable& table, const RVector& theta);
// p_theta(v, h) proportional to exp(-E(v, h)).
RMatrix classical_joint(const EnergyTable& table, const RVector& theta);
// Diagonal Hamiltonian terms with index v * hidden + h.
ParamHamiltonian classical_to_param(const EnergyTable& table, const RVector& theta);

}  // namespace qbm::model
