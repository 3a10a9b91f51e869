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

#include "qbmgrad/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qbmgrad/errors.hpp"

namespace qbm::model {

namespace {

void guard_exponent(const SpectralDecomposition& spec) {
  const double norm = spec.values.cwiseAbs().maxCoeff();
  if (norm > kMaxExponentNorm) {
    throw NumericalError("Hamiltonian norm " + std::to_string(norm) + " exceeds " +
                         std::to_string(kMaxExponentNorm) + "; thermal state would overflow");
  }
}

void check_unitary(const CMatrix& u, int d, const char* what) {
  if (u.rows() != d || u.cols() != d) {
    throw InputError(std::string(what) + " must be " + std::to_string(d) + "x" +
                     std::to_string(d));
  }
  const double defect = (u.adjoint() * u - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > kBlockTol) {
    throw InputError(std::string(what) + " is not unitary (defect " + std::to_string(defect) +
                     ")");
  }
}

// Thermal data of each block, with a common shift so that the block weights
// are computed without overflow.
void thermalize_blocks(BlockModel& m) {
  const int nx = m.num_blocks();
  m.block_spectra.clear();
  m.block_states.clear();
  double shift = std::numeric_limits<double>::infinity();
  for (int x = 0; x < nx; ++x) {
    m.block_spectra.push_back(eigh(HermitianOperator::from_computed(m.block_hamiltonians[x])));
    guard_exponent(m.block_spectra.back());
    shift = std::min(shift, m.block_spectra.back().min());
  }
  m.weights.resize(nx);
  for (int x = 0; x < nx; ++x) {
    const SpectralDecomposition& s = m.block_spectra[x];
    RVector e = (-(s.values.array() - shift)).exp();
    m.weights(x) = e.sum();
    e /= e.sum();
    m.block_states.push_back(s.vectors * e.cast<Complex>().asDiagonal() * s.vectors.adjoint());
  }
  m.weights /= m.weights.sum();
}

}  // namespace

ParamHamiltonian::ParamHamiltonian(BipartiteDims dims, std::vector<HermitianOperator> terms,
                                   RVector theta)
    : dims_(dims), terms_(std::move(terms)), theta_(std::move(theta)) {
  dims_.validate();
  if (terms_.empty()) throw InputError("Hamiltonian needs at least one term");
  if (theta_.size() != static_cast<Eigen::Index>(terms_.size())) {
    throw InputError("theta has " + std::to_string(theta_.size()) + " entries for " +
                     std::to_string(terms_.size()) + " terms");
  }
  for (const auto& g : terms_) {
    if (g.dim() != dims_.total()) {
      throw InputError("term dimension " + std::to_string(g.dim()) +
                       " does not match visible * hidden = " + std::to_string(dims_.total()));
    }
  }
  if (!theta_.allFinite()) throw InputError("theta has non-finite entries");
}

ParamHamiltonian ParamHamiltonian::with_theta(const RVector& theta) const {
  return ParamHamiltonian(dims_, terms_, theta);
}

CMatrix ParamHamiltonian::hamiltonian() const {
  CMatrix g = CMatrix::Zero(dims_.total(), dims_.total());
  for (int j = 0; j < num_params(); ++j) g += theta_(j) * terms_[j].matrix();
  return g;
}

ThermalModel ThermalModel::thermalize(const ParamHamiltonian& h) {
  ThermalModel m;
  m.param_ = h;
  m.g_ = h.hamiltonian();
  m.g_spec_ = eigh(HermitianOperator::from_computed(m.g_));
  guard_exponent(m.g_spec_);
  const double shift = m.g_spec_.min();
  RVector e = (-(m.g_spec_.values.array() - shift)).exp();
  const double s = e.sum();
  m.log_z_ = -shift + std::log(s);
  m.weights_ = e / s;
  m.sigma_vh_ = m.g_spec_.vectors * m.weights_.cast<Complex>().asDiagonal() *
                m.g_spec_.vectors.adjoint();
  m.sigma_v_ = partial_trace(m.sigma_vh_, h.dims(), Keep::Visible);
  m.sigma_v_ = 0.5 * (m.sigma_v_ + m.sigma_v_.adjoint()).eval();
  m.sigma_v_spec_ = eigh(HermitianOperator::from_computed(m.sigma_v_));
  const double lo = m.sigma_v_spec_.min();
  m.kappa_ = lo > 0.0 ? 1.0 / lo : std::numeric_limits<double>::infinity();
  return m;
}

double ThermalModel::partition() const { return std::exp(log_z_); }

void RestrictedSpec::validate() const {
  if (visible_ops.empty() || hidden_ops.empty()) {
    throw InputError("restricted model needs visible and hidden operators");
  }
  if (a.size() != m() || b.size() != n() || w.rows() != m() || w.cols() != n()) {
    throw InputError("restricted parameters do not match operator counts");
  }
  for (const auto& v : visible_ops)
    if (v.dim() != visible_ops[0].dim()) throw InputError("visible operators differ in size");
  for (const auto& h : hidden_ops)
    if (h.dim() != hidden_ops[0].dim()) throw InputError("hidden operators differ in size");
}

RVector pack_restricted(const RVector& a, const RVector& b, const RMatrix& w) {
  RVector theta(a.size() + b.size() + w.size());
  theta << a, b, RVector::Zero(w.size());
  Eigen::Index k = a.size() + b.size();
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) theta(k++) = w(i, j);
  return theta;
}

RestrictedGradient unpack_restricted(const RVector& packed, int m, int n) {
  if (packed.size() != m + n + m * n) throw InputError("packed restricted vector has wrong size");
  RestrictedGradient out{packed.head(m), packed.segment(m, n), RMatrix(m, n)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.w(i, j) = packed(m + n + i * n + j);
  return out;
}

ParamHamiltonian restricted_to_param(const RestrictedSpec& spec) {
  spec.validate();
  const int dv = spec.visible_ops[0].dim();
  const int dh = spec.hidden_ops[0].dim();
  const HermitianOperator iv = HermitianOperator::identity(dv);
  const HermitianOperator ih = HermitianOperator::identity(dh);
  std::vector<HermitianOperator> terms;
  for (const auto& v : spec.visible_ops) terms.push_back(tensor(v, ih));
  for (const auto& h : spec.hidden_ops) terms.push_back(tensor(iv, h));
  for (const auto& v : spec.visible_ops)
    for (const auto& h : spec.hidden_ops) terms.push_back(tensor(v, h));
  return ParamHamiltonian({dv, dh}, std::move(terms), pack_restricted(spec.a, spec.b, spec.w));
}

QCModel qc_decompose(const ParamHamiltonian& h, const CMatrix& hidden_basis) {
  const int dv = h.dims().visible;
  const int dh = h.dims().hidden;
  check_unitary(hidden_basis, dh, "hidden basis");
  const CMatrix rot = kron(CMatrix::Identity(dv, dv), hidden_basis);
  QCModel m;
  m.dims = h.dims();
  m.theta = h.theta();
  m.basis = hidden_basis;
  m.block_terms.assign(dh, std::vector<CMatrix>(h.num_params(), CMatrix::Zero(dv, dv)));
  m.block_hamiltonians.assign(dh, CMatrix::Zero(dv, dv));
  for (int j = 0; j < h.num_params(); ++j) {
    const CMatrix g = rot.adjoint() * h.terms()[j].matrix() * rot;
    for (int v = 0; v < dv; ++v)
      for (int w = 0; w < dv; ++w)
        for (int x = 0; x < dh; ++x)
          for (int y = 0; y < dh; ++y) {
            const Complex e = g(v * dh + x, w * dh + y);
            if (x == y) {
              m.block_terms[x][j](v, w) = e;
            } else if (std::abs(e) > kBlockTol) {
              throw InputError("term " + std::to_string(j) +
                               " is not block diagonal in the hidden basis (off-block entry " +
                               std::to_string(std::abs(e)) + ")");
            }
          }
  }
  for (int x = 0; x < dh; ++x)
    for (int j = 0; j < h.num_params(); ++j)
      m.block_hamiltonians[x] += h.theta()(j) * m.block_terms[x][j];
  thermalize_blocks(m);
  m.sigma_v = CMatrix::Zero(dv, dv);
  for (int x = 0; x < dh; ++x) m.sigma_v += m.weights(x) * m.block_states[x];
  m.sigma_v_spectrum = eigh(HermitianOperator::from_computed(m.sigma_v));
  const double lo = m.sigma_v_spectrum.min();
  m.kappa = lo > 0.0 ? 1.0 / lo : std::numeric_limits<double>::infinity();
  return m;
}

CMatrix QCModel::reassemble(int j) const {
  const int dv = dims.visible;
  const int dh = dims.hidden;
  CMatrix out = CMatrix::Zero(dv * dh, dv * dh);
  for (int x = 0; x < dh; ++x) {
    const CMatrix proj = basis.col(x) * basis.col(x).adjoint();
    out += kron(j < 0 ? block_hamiltonians[x] : block_terms[x][j], proj);
  }
  return out;
}

CQModel cq_decompose(const ParamHamiltonian& h, const CMatrix& visible_basis) {
  const int dv = h.dims().visible;
  const int dh = h.dims().hidden;
  check_unitary(visible_basis, dv, "visible basis");
  const CMatrix rot = kron(visible_basis, CMatrix::Identity(dh, dh));
  CQModel m;
  m.dims = h.dims();
  m.theta = h.theta();
  m.basis = visible_basis;
  m.block_terms.assign(dv, std::vector<CMatrix>(h.num_params(), CMatrix::Zero(dh, dh)));
  m.block_hamiltonians.assign(dv, CMatrix::Zero(dh, dh));
  for (int j = 0; j < h.num_params(); ++j) {
    const CMatrix g = rot.adjoint() * h.terms()[j].matrix() * rot;
    for (int x = 0; x < dv; ++x)
      for (int y = 0; y < dv; ++y) {
        const auto block = g.block(x * dh, y * dh, dh, dh);
        if (x == y) {
          m.block_terms[x][j] = block;
        } else if (block.cwiseAbs().maxCoeff() > kBlockTol) {
          throw InputError("term " + std::to_string(j) +
                           " is not block diagonal in the visible basis");
        }
      }
  }
  for (int x = 0; x < dv; ++x)
    for (int j = 0; j < h.num_params(); ++j)
      m.block_hamiltonians[x] += h.theta()(j) * m.block_terms[x][j];
  thermalize_blocks(m);
  return m;
}

CMatrix CQModel::reassemble(int j) const {
  const int dv = dims.visible;
  const int dh = dims.hidden;
  CMatrix out = CMatrix::Zero(dv * dh, dv * dh);
  for (int x = 0; x < dv; ++x) {
    const CMatrix proj = basis.col(x) * basis.col(x).adjoint();
    out += kron(proj, j < 0 ? block_hamiltonians[x] : block_terms[x][j]);
  }
  return out;
}

void EnergyTable::validate() const {
  if (visible < 1 || hidden < 1) throw InputError("energy table needs positive dimensions");
  if (terms.empty()) throw InputError("energy table needs at least one term");
  for (const auto& t : terms) {
    if (t.rows() != visible || t.cols() != hidden) {
      throw InputError("energy term shape does not match visible x hidden");
    }
    if (!t.allFinite()) throw InputError("energy term has non-finite entries");
  }
}

RMatrix classical_energy(const EnergyTable& table, const RVector& theta) {
  table.validate();
  if (theta.size() != table.num_params()) throw InputError("theta does not match energy terms");
  RMatrix e = RMatrix::Zero(table.visible, table.hidden);
  for (int j = 0; j < table.num_params(); ++j) e += theta(j) * table.terms[j];
  return e;
}

RMatrix classical_joint(const EnergyTable& table, const RVector& theta) {
  const RMatrix e = classical_energy(table, theta);
  if (e.cwiseAbs().maxCoeff() > kMaxExponentNorm) {
    throw NumericalError("classical energies exceed the exponent guard");
  }
  RMatrix p = (-(e.array() - e.minCoeff())).exp().matrix();
  return p / p.sum();
}

ParamHamiltonian classical_to_param(const EnergyTable& table, const RVector& theta) {
  table.validate();
  std::vector<HermitianOperator> terms;
  for (const auto& t : table.terms) {
    RVector diag(table.visible * table.hidden);
    for (int v = 0; v < table.visible; ++v)
      for (int h = 0; h < table.hidden; ++h) diag(v * table.hidden + h) = t(v, h);
    terms.push_back(HermitianOperator::diagonal(diag));
  }
  return ParamHamiltonian({table.visible, table.hidden}, std::move(terms), theta);
}

}  // namespace qbm::model
