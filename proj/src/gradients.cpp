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

#include "qbmgrad/gradients.hpp"

#include <cmath>
#include <string>

#include "qbmgrad/errors.hpp"

namespace qbm::grad {

using matcalc::ChannelKind;
using matcalc::EvalMode;

namespace {

void require_support(const SpectralDecomposition& sigma) {
  if (!(sigma.min() > kSupportTol)) {
    throw NumericalError("model marginal is (numerically) singular: min eigenvalue " +
                         std::to_string(sigma.min()) +
                         "; the target may lie outside its support");
  }
}

ChannelKind visible_channel(double q) {
  return q == 1.0 ? ChannelKind::log_logistic() : ChannelKind::power_beta(1.0 - q);
}

double objective_q(const Objective& obj) { return obj.is_umegaki() ? 1.0 : obj.q; }

// sigma_v^{-q/2} U(x) sigma_v^{-q/2} on the visible space.
CMatrix transformed_target(const SpectralDecomposition& sv, const CMatrix& x, double q,
                           const EvalMode& mode) {
  require_support(sv);
  CMatrix y = matcalc::apply_in_eigenbasis(visible_channel(q), sv, sv.to_eigenbasis(x), mode);
  const RVector side = sv.values.array().pow(-0.5 * q);
  y = side.cast<Complex>().asDiagonal() * y * side.cast<Complex>().asDiagonal();
  return sv.from_eigenbasis(y);
}

CMatrix target_input(const QuantumState& rho, double q) {
  return q == 1.0 ? rho.matrix() : state_power(rho, q);
}

// Tr[x sigma^{1-q}]
double power_overlap(const SpectralDecomposition& sv, const CMatrix& x, double q) {
  const RVector p = sv.values.array().pow(1.0 - q);
  return trace_product_real(x, sv.from_eigenbasis(p.cast<Complex>().asDiagonal()));
}

void check_probabilities(const RVector& r, int n) {
  if (r.size() != n) {
    throw InputError("target distribution has " + std::to_string(r.size()) +
                     " entries, expected " + std::to_string(n));
  }
  if ((r.array() < 0.0).any()) throw InputError("target distribution has negative entries");
  if (std::abs(r.sum() - 1.0) > kStateTol) throw InputError("target distribution must sum to 1");
}

}  // namespace

Objective Objective::petz_tsallis(double q) {
  if (!(q > 0.0 && q <= 2.0) || q == 1.0) {
    throw InputError("Petz-Tsallis order must lie in (0, 1) or (1, 2], got " +
                     std::to_string(q));
  }
  return {Kind::PetzTsallis, q};
}

std::string Objective::name() const {
  return is_umegaki() ? "umegaki" : "tsallis(q=" + std::to_string(q) + ")";
}

CMatrix state_power(const QuantumState& rho, double q) {
  const SpectralDecomposition s = eigh(rho.op());
  RVector p(s.dim());
  for (int i = 0; i < s.dim(); ++i) p(i) = s.values(i) > 0.0 ? std::pow(s.values(i), q) : 0.0;
  return s.from_eigenbasis(p.cast<Complex>().asDiagonal());
}

double relative_entropy(const QuantumState& rho, const CMatrix& sigma, const Objective& obj) {
  if (sigma.rows() != rho.dim()) throw InputError("relative_entropy: dimension mismatch");
  const SpectralDecomposition ss = eigh(HermitianOperator::from_computed(sigma));
  require_support(ss);
  if (obj.is_umegaki()) {
    const RVector ev = eigh(rho.op()).values;
    double neg_entropy = 0.0;
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) > 0.0) neg_entropy += ev(i) * std::log(ev(i));
    const RVector log_s = ss.values.array().log();
    const CMatrix ln_sigma = ss.from_eigenbasis(log_s.cast<Complex>().asDiagonal());
    return neg_entropy - trace_product_real(rho.matrix(), ln_sigma);
  }
  const double qf = power_overlap(ss, state_power(rho, obj.q), obj.q);
  return (qf - 1.0) / (obj.q - 1.0);
}

double relative_entropy(const QuantumState& rho, const QuantumState& sigma, const Objective& obj) {
  return relative_entropy(rho, sigma.matrix(), obj);
}

double classical_divergence(const RVector& r, const RVector& p, const Objective& obj) {
  if (r.size() != p.size()) throw InputError("classical_divergence: size mismatch");
  double acc = 0.0;
  for (Eigen::Index x = 0; x < r.size(); ++x) {
    if (r(x) == 0.0) continue;
    if (!(p(x) > 0.0)) throw NumericalError("target has mass outside the model support");
    acc += obj.is_umegaki() ? r(x) * std::log(r(x) / p(x))
                            : std::pow(r(x), obj.q) * std::pow(p(x), 1.0 - obj.q);
  }
  return obj.is_umegaki() ? acc : (acc - 1.0) / (obj.q - 1.0);
}

HermitianOperator sigma_map(const model::ThermalModel& m, const HermitianOperator& x, double q,
                            const EvalMode& mode) {
  const BipartiteDims& dims = m.dims();
  if (x.dim() != dims.visible) throw InputError("sigma_map: input must act on the visible space");
  const CMatrix t = transformed_target(m.sigma_v_spectrum(), x.matrix(), q, mode);
  const CMatrix lifted = kron(t, CMatrix::Identity(dims.hidden, dims.hidden));
  const CMatrix xi = 0.5 * (m.sigma_vh() * lifted + lifted * m.sigma_vh());
  return HermitianOperator::from_computed(
      matcalc::apply_channel(ChannelKind::exp_tent(), m.g_spectrum(), xi, mode));
}

GradientReport grad(const model::ThermalModel& m, const QuantumState& rho, const Objective& obj) {
  if (rho.dim() != m.dims().visible) {
    throw InputError("target state dimension " + std::to_string(rho.dim()) +
                     " does not match visible dimension " + std::to_string(m.dims().visible));
  }
  const double q = objective_q(obj);
  const CMatrix x = target_input(rho, q);
  const HermitianOperator s = sigma_map(m, HermitianOperator::from_computed(x), q);
  const auto& terms = m.param().terms();
  const int n = m.param().num_params();
  GradientReport out;
  out.first_terms.resize(n);
  out.second_terms.resize(n);
  for (int j = 0; j < n; ++j) {
    out.first_terms(j) = trace_product_real(terms[j].matrix(), s.matrix());
    out.second_terms(j) = trace_product_real(terms[j].matrix(), m.sigma_vh());
  }
  out.q_factor = obj.is_umegaki() ? 1.0 : power_overlap(m.sigma_v_spectrum(), x, q);
  out.values = out.first_terms - out.q_factor * out.second_terms;
  return out;
}

GradientReport grad_qc(const model::QCModel& m, const QuantumState& rho, const Objective& obj) {
  if (rho.dim() != m.dims.visible) throw InputError("grad_qc: target must act on visible space");
  const double q = objective_q(obj);
  const CMatrix x = target_input(rho, q);
  const CMatrix t = transformed_target(m.sigma_v_spectrum, x, q, EvalMode::spectral());
  const int n = m.num_params();
  GradientReport out;
  out.first_terms = RVector::Zero(n);
  out.second_terms = RVector::Zero(n);
  for (int b = 0; b < m.num_blocks(); ++b) {
    const CMatrix& sx = m.block_states[b];
    const CMatrix xi = 0.5 * (sx * t + t * sx);
    const CMatrix s = matcalc::apply_channel(ChannelKind::exp_tent(), m.block_spectra[b], xi);
    for (int j = 0; j < n; ++j) {
      out.first_terms(j) += m.weights(b) * trace_product_real(m.block_terms[b][j], s);
      out.second_terms(j) += m.weights(b) * trace_product_real(m.block_terms[b][j], sx);
    }
  }
  out.q_factor = obj.is_umegaki() ? 1.0 : power_overlap(m.sigma_v_spectrum, x, q);
  out.values = out.first_terms - out.q_factor * out.second_terms;
  return out;
}

GradientReport grad_cq(const model::CQModel& m, const RVector& target, const Objective& obj) {
  check_probabilities(target, m.num_blocks());
  const int n = m.num_params();
  GradientReport out;
  out.first_terms = RVector::Zero(n);
  out.second_terms = RVector::Zero(n);
  out.q_factor = obj.is_umegaki() ? 1.0 : 0.0;
  for (int x = 0; x < m.num_blocks(); ++x) {
    const double p = m.weights(x);
    const double r = target(x);
    if (r > 0.0 && !(p > 0.0)) {
      throw NumericalError("target puts mass on visible label " + std::to_string(x) +
                           " where the model has none");
    }
    double w = r;
    if (!obj.is_umegaki()) {
      w = r > 0.0 ? std::pow(r, obj.q) * std::pow(p, 1.0 - obj.q) : 0.0;
      out.q_factor += w;
    }
    for (int j = 0; j < n; ++j) {
      const double e = trace_product_real(m.block_terms[x][j], m.block_states[x]);
      out.first_terms(j) += w * e;
      out.second_terms(j) += p * e;
    }
  }
  out.values = out.first_terms - out.q_factor * out.second_terms;
  return out;
}

std::vector<HermitianOperator> pgm_povm(const model::QCModel& m) {
  const SpectralDecomposition& sv = m.sigma_v_spectrum;
  require_support(sv);
  const RVector side = sv.values.cwiseSqrt().cwiseInverse();
  std::vector<HermitianOperator> out;
  for (int x = 0; x < m.num_blocks(); ++x) {
    CMatrix y = sv.to_eigenbasis(m.weights(x) * m.block_states[x]);
    y = side.cast<Complex>().asDiagonal() * y * side.cast<Complex>().asDiagonal();
    y = matcalc::apply_in_eigenbasis(ChannelKind::log_logistic(), sv, y);
    out.push_back(HermitianOperator::from_computed(sv.from_eigenbasis(y)));
  }
  return out;
}

RVector povm_probabilities(const std::vector<HermitianOperator>& povm, const QuantumState& rho) {
  RVector out(povm.size());
  for (std::size_t x = 0; x < povm.size(); ++x) out(x) = expectation(povm[x], rho);
  return out;
}

model::RestrictedGradient restricted_grads(RestrictedKind kind, const model::RestrictedSpec& spec,
                                           const CMatrix& basis, const QuantumState* target_state,
                                           const RVector* target_probs, const Objective& obj) {
  const model::ParamHamiltonian h = model::restricted_to_param(spec);
  GradientReport report;
  switch (kind) {
    case RestrictedKind::FullyQuantum:
      if (target_state == nullptr) throw InputError("fully quantum gradient needs a target state");
      report = grad(model::ThermalModel::thermalize(h), *target_state, obj);
      break;
    case RestrictedKind::QC:
      if (target_state == nullptr) throw InputError("qc gradient needs a target state");
      report = grad_qc(model::qc_decompose(h, basis), *target_state, obj);
      break;
    case RestrictedKind::CQ:
      if (target_probs == nullptr) throw InputError("cq gradient needs a target distribution");
      report = grad_cq(model::cq_decompose(h, basis), *target_probs, obj);
      break;
  }
  return model::unpack_restricted(report.values, spec.m(), spec.n());
}

RVector classical_gradient(const model::EnergyTable& table, const RVector& theta,
                           const RVector& target) {
  check_probabilities(target, table.visible);
  const RMatrix p = model::classical_joint(table, theta);
  const RVector pv = p.rowwise().sum();
  RVector out(table.num_params());
  for (int j = 0; j < table.num_params(); ++j) {
    const RMatrix& g = table.terms[j];
    double first = 0.0;
    for (int v = 0; v < table.visible; ++v) {
      if (target(v) == 0.0) continue;
      if (!(pv(v) > 0.0)) throw NumericalError("target outside classical model support");
      first += target(v) * p.row(v).dot(g.row(v)) / pv(v);
    }
    out(j) = first - p.cwiseProduct(g).sum();
  }
  return out;
}

double classical_objective(const model::EnergyTable& table, const RVector& theta,
                           const RVector& target) {
  check_probabilities(target, table.visible);
  const RVector pv = model::classical_joint(table, theta).rowwise().sum();
  return classical_divergence(target, pv, Objective::umegaki());
}

}  // namespace qbm::grad
