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

#include "qbmgrad/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "qbmgrad/errors.hpp"
#include "qbmgrad/quadrature.hpp"

namespace qbm::estimator {

namespace {

constexpr double kContractionTol = 1e-10;
constexpr double kProbClamp = 1e-10;
constexpr double kProbDefect = 1e-8;

// Square root of a PSD matrix; eigenvalues below 1e-13 are rounding noise
// of I - C C^+ for (near-)isometric C and are set to zero.
CMatrix psd_sqrt(const CMatrix& a) {
  const SpectralDecomposition s = eigh(HermitianOperator::from_computed(a));
  RVector r(s.dim());
  for (int i = 0; i < s.dim(); ++i) r(i) = s.values(i) > 1e-13 ? std::sqrt(s.values(i)) : 0.0;
  return s.from_eigenbasis(r.cast<Complex>().asDiagonal());
}

void require_support(const model::ThermalModel& m) {
  if (!(m.sigma_v_spectrum().min() > 1e-12)) {
    throw NumericalError("visible marginal is singular; the estimator needs a full-rank sigma_v");
  }
}

struct Registers {
  int dv;
  int dh;

  int total() const { return dv * 4 * dv * dh; }
  int index(int v1, int a1, int a2, int v2, int h) const {
    return (((v1 * 2 + a1) * 2 + a2) * dv + v2) * dh + h;
  }
};

void check_registers(const Registers& r) {
  if (r.total() > kMaxCircuitDim) {
    throw InputError("circuit register dimension " + std::to_string(r.total()) + " exceeds " +
                     std::to_string(kMaxCircuitDim));
  }
}

void check_encoding(const BlockEncoding& be, int dv, const char* what) {
  if (be.ancillas != 1 || be.system_dim() != dv || be.unitary.rows() != 2 * dv) {
    throw InputError(std::string(what) + " must be a one-ancilla encoding on the visible space");
  }
}

// State of (v1, a1, a2) after both encodings act on rho (x) |00><00|.
CMatrix encoded_state(const CMatrix& rho, const BlockEncoding& modular,
                      const BlockEncoding& inv_sqrt) {
  const int dv = static_cast<int>(rho.rows());
  const int d = 4 * dv;
  CMatrix u_mod = CMatrix::Zero(d, d);
  CMatrix u_inv = CMatrix::Zero(d, d);
  for (int v = 0; v < dv; ++v)
    for (int w = 0; w < dv; ++w)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) {
            // modular acts on (a1, v1), inv_sqrt on (a2, v1)
            u_mod(v * 4 + a * 2 + c, w * 4 + b * 2 + c) = modular.unitary(a * dv + v, b * dv + w);
            u_inv(v * 4 + c * 2 + a, w * 4 + c * 2 + b) = inv_sqrt.unitary(a * dv + v, b * dv + w);
          }
  CMatrix rho0 = CMatrix::Zero(d, d);
  for (int v = 0; v < dv; ++v)
    for (int w = 0; w < dv; ++w) rho0(v * 4, w * 4) = rho(v, w);
  const CMatrix u = u_inv * u_mod;
  return u * rho0 * u.adjoint();
}

CMatrix evolved_observable(const SpectralDecomposition& g, const CMatrix& gj, double t) {
  const int d = g.dim();
  CMatrix y = g.to_eigenbasis(gj);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      y(k, l) *= std::exp(Complex(0.0, (g.values(k) - g.values(l)) * t));
  return g.from_eigenbasis(y);
}

std::vector<int> swap_permutation(const Registers& r) {
  std::vector<int> perm(r.total());
  for (int v1 = 0; v1 < r.dv; ++v1)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int v2 = 0; v2 < r.dv; ++v2)
          for (int h = 0; h < r.dh; ++h) perm[r.index(v1, a1, a2, v2, h)] = r.index(v2, a1, a2, v1, h);
  return perm;
}

// Tr[P F^a omega F^b] for the four control blocks, F the v1 <-> v2 swap.
struct SwapTraces {
  Complex plain;   // Tr[P omega]
  Complex both;    // Tr[P F omega F]
  Complex left;    // Tr[P F omega]
  Complex right;   // Tr[P omega F]
};

SwapTraces swap_traces(const CMatrix& p, const CMatrix& omega, const std::vector<int>& perm) {
  SwapTraces out{0.0, 0.0, 0.0, 0.0};
  const int d = static_cast<int>(p.rows());
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const Complex pki = p(k, i);
      if (pki == Complex(0.0)) continue;
      out.plain += pki * omega(i, k);
      out.both += pki * omega(perm[i], perm[k]);
      out.left += pki * omega(perm[i], k);
      out.right += pki * omega(i, perm[k]);
    }
  return out;
}

CMatrix register_observable(const Registers& r, const CMatrix& o_vh) {
  CMatrix p00 = CMatrix::Zero(4, 4);
  p00(0, 0) = 1.0;
  return kron(kron(CMatrix::Identity(r.dv, r.dv), p00), o_vh);
}

double control_x_expectation(const CMatrix& o, const CMatrix& omega, const std::vector<int>& perm) {
  const SwapTraces tr = swap_traces(o, omega, perm);
  const Complex v = 0.5 * (tr.left + tr.right);
  if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real()))) {
    throw NumericalError("circuit expectation has imaginary residue " + std::to_string(v.imag()));
  }
  return v.real();
}

// Distinct eigenvalues of G_j with the eigenvector indices in each group.
void group_levels(const SpectralDecomposition& s, std::vector<double>& levels,
                  std::vector<std::vector<int>>& members) {
  const double tol = 1e-9 * std::max(1.0, s.values.cwiseAbs().maxCoeff());
  levels.clear();
  members.clear();
  for (int i = 0; i < s.dim(); ++i) {
    if (levels.empty() || s.values(i) - levels.back() > tol) {
      levels.push_back(s.values(i));
      members.push_back({i});
    } else {
      members.back().push_back(i);
    }
  }
  for (std::size_t g = 0; g < levels.size(); ++g) {
    double mean = 0.0;
    for (int i : members[g]) mean += s.values(i);
    levels[g] = mean / members[g].size();
  }
}

void finalize_table(OutcomeTable& table, double p0, double p1) {
  double s0 = 0.0;
  double s1 = 0.0;
  for (std::size_t g = 0; g + 1 < table.eigenvalues.size(); ++g) {
    s0 += table.prob_z0[g];
    s1 += table.prob_z1[g];
  }
  table.prob_z0.back() = p0 - s0;
  table.prob_z1.back() = p1 - s1;
  double total = 0.0;
  for (auto* probs : {&table.prob_z0, &table.prob_z1}) {
    for (double& p : *probs) {
      if (p < -kProbClamp) {
        throw NumericalError("outcome probability " + std::to_string(p) + " is negative");
      }
      p = std::max(p, 0.0);
      total += p;
    }
  }
  if (std::abs(total - 1.0) > kProbDefect) {
    throw NumericalError("outcome probabilities sum to " + std::to_string(total));
  }
}

}  // namespace

CMatrix BlockEncoding::encoded() const {
  const int d = system_dim();
  return alpha * unitary.topLeftCorner(d, d);
}

CMatrix BlockEncoding::block(int out, int in) const {
  if (ancillas != 1) throw InputError("block() needs a one-ancilla encoding");
  const int d = system_dim();
  return unitary.block(out * d, in * d, d, d);
}

BlockEncoding dilate(const CMatrix& contraction, double alpha) {
  if (contraction.rows() != contraction.cols()) throw InputError("dilate needs a square matrix");
  if (!(alpha > 0.0)) throw InputError("block-encoding normalization must be positive");
  const double norm = spectral_norm(contraction);
  if (norm > 1.0 + kContractionTol) {
    throw InputError("dilate needs a contraction, got spectral norm " + std::to_string(norm));
  }
  const int d = static_cast<int>(contraction.rows());
  const CMatrix id = CMatrix::Identity(d, d);
  BlockEncoding be;
  be.unitary.resize(2 * d, 2 * d);
  be.unitary.topLeftCorner(d, d) = contraction;
  be.unitary.topRightCorner(d, d) = psd_sqrt(id - contraction * contraction.adjoint());
  be.unitary.bottomLeftCorner(d, d) = psd_sqrt(id - contraction.adjoint() * contraction);
  be.unitary.bottomRightCorner(d, d) = -contraction.adjoint();
  be.alpha = alpha;
  be.ancillas = 1;
  be.delta = 0.0;
  return be;
}

BlockEncoding modular_unitary(const model::ThermalModel& m, double s) {
  require_support(m);
  const SpectralDecomposition& sv = m.sigma_v_spectrum();
  const CMatrix a = matrix_function_complex(
      sv, [s](double l) { return std::exp(Complex(0.0, -0.5 * s * std::log(l))); });
  return dilate(a, 1.0);
}

BlockEncoding inv_sqrt_encoding(const model::ThermalModel& m) {
  require_support(m);
  const SpectralDecomposition& sv = m.sigma_v_spectrum();
  const double lo = sv.min();
  const CMatrix c = matrix_function_complex(sv, [lo](double l) { return std::sqrt(lo / l); });
  return dilate(c, std::sqrt(m.kappa()));
}

double circuit_expectation(const model::ThermalModel& m, const QuantumState& rho,
                           const HermitianOperator& gj, double s, double t) {
  return circuit_expectation(m, rho, gj, t, modular_unitary(m, s), inv_sqrt_encoding(m));
}

double circuit_expectation(const model::ThermalModel& m, const QuantumState& rho,
                           const HermitianOperator& gj, double t, const BlockEncoding& modular,
                           const BlockEncoding& inv_sqrt) {
  const Registers r{m.dims().visible, m.dims().hidden};
  check_registers(r);
  check_encoding(modular, r.dv, "modular encoding");
  check_encoding(inv_sqrt, r.dv, "inverse square root encoding");
  if (rho.dim() != r.dv || gj.dim() != r.dv * r.dh) throw InputError("circuit operand dimensions");
  const CMatrix omega = kron(encoded_state(rho.matrix(), modular, inv_sqrt), m.sigma_vh());
  const CMatrix o = register_observable(r, evolved_observable(m.g_spectrum(), gj.matrix(), t));
  const double scale = std::pow(modular.alpha * inv_sqrt.alpha, 2);
  return scale * control_x_expectation(o, omega, swap_permutation(r));
}

double transformed_trace(const model::ThermalModel& m, const QuantumState& rho,
                         const HermitianOperator& gj, double s, double t) {
  require_support(m);
  const SpectralDecomposition& sv = m.sigma_v_spectrum();
  const CMatrix a = matrix_function_complex(sv, [s](double l) {
    return std::exp(Complex(0.0, -0.5 * s * std::log(l))) / std::sqrt(l);
  });
  const CMatrix x = a * rho.matrix() * a.adjoint();
  const CMatrix lifted = kron(x, CMatrix::Identity(m.dims().hidden, m.dims().hidden));
  const CMatrix o = evolved_observable(m.g_spectrum(), gj.matrix(), t);
  return 0.5 * trace_product_real(o, m.sigma_vh() * lifted + lifted * m.sigma_vh());
}

double averaged_circuit_expectation(const model::ThermalModel& m, const QuantumState& rho,
                                    const HermitianOperator& gj) {
  return averaged_circuit_expectation(
      m, rho, gj, [&m](double s) { return modular_unitary(m, s); }, inv_sqrt_encoding(m));
}

double averaged_circuit_expectation(
    const model::ThermalModel& m, const QuantumState& rho, const HermitianOperator& gj,
    const std::function<BlockEncoding(double)>& modular, const BlockEncoding& inv_sqrt) {
  const Registers r{m.dims().visible, m.dims().hidden};
  check_registers(r);
  check_encoding(inv_sqrt, r.dv, "inverse square root encoding");
  // The circuit value is bilinear in the prepared state (depends on s) and
  // the observable (depends on t), so the product-grid sum factorizes into
  // a weighted state and a weighted observable.
  const Density ds = Density::logistic();
  const quad::Rule s_rule = quad::trapezoid(-12.0, 12.0, 193);
  CMatrix rho_bar = CMatrix::Zero(4 * r.dv, 4 * r.dv);
  double alpha1 = 0.0;
  for (std::size_t i = 0; i < s_rule.size(); ++i) {
    const BlockEncoding mod = modular(s_rule.nodes[i]);
    check_encoding(mod, r.dv, "modular encoding");
    if (i > 0 && mod.alpha != alpha1) throw InputError("modular encodings must share alpha");
    alpha1 = mod.alpha;
    rho_bar += s_rule.weights[i] * pdf(ds, s_rule.nodes[i]) *
               encoded_state(rho.matrix(), mod, inv_sqrt);
  }
  const Density dt = Density::high_peak_tent();
  const quad::Rule t_rule = quad::tanh_sinh(0.0, 12.0, 240);
  CMatrix o_bar = CMatrix::Zero(r.dv * r.dh, r.dv * r.dh);
  for (std::size_t i = 0; i < t_rule.size(); ++i) {
    const double w = t_rule.weights[i] * pdf(dt, t_rule.nodes[i]);
    o_bar += w * (evolved_observable(m.g_spectrum(), gj.matrix(), t_rule.nodes[i]) +
                  evolved_observable(m.g_spectrum(), gj.matrix(), -t_rule.nodes[i]));
  }
  const CMatrix omega = kron(rho_bar, m.sigma_vh());
  const double scale = std::pow(alpha1 * inv_sqrt.alpha, 2);
  return scale *
         control_x_expectation(register_observable(r, o_bar), omega, swap_permutation(r));
}

OutcomeTable register_outcomes(const model::ThermalModel& m, const QuantumState& rho,
                               const HermitianOperator& gj, double t,
                               const BlockEncoding& modular, const BlockEncoding& inv_sqrt) {
  const Registers r{m.dims().visible, m.dims().hidden};
  check_registers(r);
  check_encoding(modular, r.dv, "modular encoding");
  check_encoding(inv_sqrt, r.dv, "inverse square root encoding");
  const CMatrix omega = kron(encoded_state(rho.matrix(), modular, inv_sqrt), m.sigma_vh());
  const std::vector<int> perm = swap_permutation(r);

  const SpectralDecomposition sj = eigh(gj);
  std::vector<double> levels;
  std::vector<std::vector<int>> members;
  group_levels(sj, levels, members);

  OutcomeTable table;
  table.eigenvalues = levels;
  table.eigenvalues.push_back(0.0);
  table.prob_z0.assign(table.eigenvalues.size(), 0.0);
  table.prob_z1.assign(table.eigenvalues.size(), 0.0);
  const SpectralDecomposition& g = m.g_spectrum();
  for (std::size_t lv = 0; lv < levels.size(); ++lv) {
    CMatrix proj = CMatrix::Zero(sj.dim(), sj.dim());
    for (int i : members[lv]) proj += sj.vectors.col(i) * sj.vectors.col(i).adjoint();
    // eigenprojector of e^{iGt} G_j e^{-iGt}
    const CMatrix proj_t = evolved_observable(g, proj, t);
    const SwapTraces tr = swap_traces(register_observable(r, proj_t), omega, perm);
    table.prob_z0[lv] = 0.25 * (tr.plain + tr.both + tr.left + tr.right).real();
    table.prob_z1[lv] = 0.25 * (tr.plain + tr.both - tr.left - tr.right).real();
  }
  const SwapTraces all =
      swap_traces(CMatrix::Identity(r.total(), r.total()), omega, perm);
  const double p0 = 0.25 * (all.plain + all.both + all.left + all.right).real();
  const double p1 = 0.25 * (all.plain + all.both - all.left - all.right).real();
  finalize_table(table, p0, p1);
  return table;
}

ShotSampler::ShotSampler(const model::ThermalModel& m, const QuantumState& rho,
                         const HermitianOperator& gj)
    : sigma_vh_(m.sigma_vh()),
      rho_(rho.matrix()),
      dv_(m.dims().visible),
      dh_(m.dims().hidden),
      kappa_(m.kappa()),
      s_sampler_(Density::logistic(), 0),
      t_sampler_(Density::high_peak_tent(), 0) {
  require_support(m);
  if (rho.dim() != dv_) throw InputError("target state must act on the visible space");
  if (gj.dim() != dv_ * dh_) throw InputError("observable must act on visible (x) hidden");
  sigma_h_ = partial_trace(m.sigma_vh(), m.dims(), Keep::Hidden);
  const SpectralDecomposition sj = eigh(gj);
  g_norm_ = sj.values.cwiseAbs().maxCoeff();
  group_levels(sj, levels_, level_members_);
  g_vectors_ = m.g_spectrum().vectors;
  g_values_ = m.g_spectrum().values;
  overlap_ = sj.vectors.adjoint() * g_vectors_;
  const RVector& w = m.boltzmann_weights();
  level_prob_vh_ = RVector::Zero(levels_.size());
  for (std::size_t lv = 0; lv < levels_.size(); ++lv)
    for (int i : level_members_[lv])
      for (int k = 0; k < w.size(); ++k) level_prob_vh_(lv) += std::norm(overlap_(i, k)) * w(k);
  sv_ = m.sigma_v_spectrum();
  inv_sqrt_ = inv_sqrt_encoding(m);
}

OutcomeTable ShotSampler::outcomes_from(const CMatrix& x, const CMatrix& tau, double t) const {
  const int d = dv_ * dh_;
  const CMatrix x_sigma_h = kron(x, sigma_h_);
  const CMatrix lifted = kron(x, CMatrix::Identity(dh_, dh_));
  const CMatrix anti = lifted * sigma_vh_ + sigma_vh_ * lifted;
  // Tr[e^{iGt} Pi_g e^{-iGt} M] = Tr[Pi_g e^{-iGt} M e^{iGt}], evaluated in
  // the eigenbasis of G and then projected onto the G_j eigenspaces.
  CMatrix phase(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      phase(k, l) = std::exp(Complex(0.0, -(g_values_(k) - g_values_(l)) * t));
  const auto level_traces = [&](const CMatrix& mat) {
    const CMatrix w = (g_vectors_.adjoint() * mat * g_vectors_).cwiseProduct(phase);
    const CVector diag = (overlap_ * w).cwiseProduct(overlap_.conjugate()).rowwise().sum();
    RVector out = RVector::Zero(levels_.size());
    for (std::size_t lv = 0; lv < levels_.size(); ++lv)
      for (int i : level_members_[lv]) out(lv) += diag(i).real();
    return out;
  };
  const RVector b = level_traces(x_sigma_h);
  const RVector c = level_traces(anti);
  const double tr_x = x.trace().real();

  OutcomeTable table;
  table.eigenvalues = levels_;
  table.eigenvalues.push_back(0.0);
  table.prob_z0.assign(table.eigenvalues.size(), 0.0);
  table.prob_z1.assign(table.eigenvalues.size(), 0.0);
  for (std::size_t lv = 0; lv < levels_.size(); ++lv) {
    const double base = tr_x * level_prob_vh_(lv) + b(lv);
    table.prob_z0[lv] = 0.25 * (base + c(lv));
    table.prob_z1[lv] = 0.25 * (base - c(lv));
  }
  const double overlap = trace_product_real(tau, sv_.reconstruct());
  finalize_table(table, 0.5 * (1.0 + overlap), 0.5 * (1.0 - overlap));
  return table;
}

OutcomeTable ShotSampler::outcomes(double s, double t) const {
  const CMatrix a = matrix_function_complex(
      sv_, [s](double l) { return std::exp(Complex(0.0, -0.5 * s * std::log(l))); });
  const CMatrix b = inv_sqrt_.block(0, 0);
  const CMatrix leak = inv_sqrt_.block(1, 0);
  const CMatrix y = a * rho_ * a.adjoint();
  const CMatrix x = b * y * b.adjoint();
  return outcomes_from(x, x + leak * y * leak.adjoint(), t);
}

OutcomeTable ShotSampler::outcomes(double t, const BlockEncoding& modular,
                                   const BlockEncoding& inv_sqrt) const {
  check_encoding(modular, dv_, "modular encoding");
  check_encoding(inv_sqrt, dv_, "inverse square root encoding");
  CMatrix x;
  CMatrix tau = CMatrix::Zero(dv_, dv_);
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2) {
      const CMatrix k = inv_sqrt.block(a2, 0) * modular.block(a1, 0);
      const CMatrix part = k * rho_ * k.adjoint();
      if (a1 == 0 && a2 == 0) x = part;
      tau += part;
    }
  return outcomes_from(x, tau, t);
}

ShotRecord ShotSampler::shot(std::mt19937_64& rng) const {
  ShotRecord rec;
  rec.s = s_sampler_.draw(rng);
  rec.t = t_sampler_.draw(rng);
  const OutcomeTable table = outcomes(rec.s, rec.t);
  double u = open_uniform(rng);
  const std::size_t n = table.eigenvalues.size();
  std::size_t pick = 2 * n - 1;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const double p = i < n ? table.prob_z0[i] : table.prob_z1[i - n];
    if (u < p) {
      pick = i;
      break;
    }
    u -= p;
  }
  rec.z = pick < n ? 0 : 1;
  rec.g = table.eigenvalues[pick % n];
  rec.y = rec.z == 0 ? rec.g : -rec.g;
  return rec;
}

double ShotSampler::second_term_shot(std::mt19937_64& rng) const {
  double u = open_uniform(rng) * level_prob_vh_.sum();
  for (std::size_t lv = 0; lv < levels_.size(); ++lv) {
    if (u < level_prob_vh_(lv)) return levels_[lv];
    u -= level_prob_vh_(lv);
  }
  return levels_.back();
}

ShotRecord shot_sample(const ShotSampler& sampler, std::mt19937_64& rng) {
  return sampler.shot(rng);
}

std::uint64_t hoeffding_shots(double kappa, double g_norm, double epsilon, double delta) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InputError("kappa must be finite and > 0");
  if (!(g_norm > 0.0)) throw InputError("observable norm must be positive");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  const double ratio = kappa * g_norm / epsilon;
  const double m = std::ceil(2.0 * ratio * ratio * std::log(2.0 / delta));
  if (m > 1e15) throw InputError("shot count exceeds 1e15");
  return static_cast<std::uint64_t>(m);
}

namespace {

template <typename Draw>
Estimate run_shots(std::uint64_t shots, const EstimatorConfig& cfg, double scale, Draw draw) {
  if (shots == 0) throw InputError("estimator needs at least one shot");
  const std::uint64_t chunks = (shots + kShotChunk - 1) / kShotChunk;
  std::vector<double> sums(chunks, 0.0);
  std::vector<double> squares(chunks, 0.0);
  const auto work = [&](std::uint64_t first, std::uint64_t stride) {
    for (std::uint64_t c = first; c < chunks; c += stride) {
      std::mt19937_64 rng(cfg.seed ^ c);
      const std::uint64_t n = std::min(kShotChunk, shots - c * kShotChunk);
      for (std::uint64_t i = 0; i < n; ++i) {
        const double y = draw(rng);
        sums[c] += y;
        squares[c] += y * y;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(chunks)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
    for (auto& th : pool) th.join();
  }
  double sum = 0.0;
  double sq = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    sq += squares[c];
  }
  const double n = static_cast<double>(shots);
  const double mean = sum / n;
  const double var = shots > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
  Estimate est;
  est.mean = scale * mean;
  est.std_error = scale * std::sqrt(var / n);
  est.shots = shots;
  return est;
}

}  // namespace

Estimate estimate_first_term(const ShotSampler& sampler, const EstimatorConfig& cfg) {
  const std::uint64_t shots =
      cfg.shots > 0 ? cfg.shots
                    : hoeffding_shots(sampler.kappa(), sampler.g_norm(), cfg.epsilon, cfg.delta);
  Estimate est = run_shots(shots, cfg, sampler.kappa(),
                           [&sampler](std::mt19937_64& rng) { return sampler.shot(rng).y; });
  est.kappa = sampler.kappa();
  est.g_norm = sampler.g_norm();
  return est;
}

Estimate estimate_first_term(const model::ThermalModel& m, const QuantumState& rho,
                             const HermitianOperator& gj, const EstimatorConfig& cfg) {
  return estimate_first_term(ShotSampler(m, rho, gj), cfg);
}

Estimate estimate_second_term(const ShotSampler& sampler, const EstimatorConfig& cfg) {
  const std::uint64_t shots =
      cfg.shots > 0 ? cfg.shots : hoeffding_shots(1.0, sampler.g_norm(), cfg.epsilon, cfg.delta);
  Estimate est = run_shots(shots, cfg, 1.0, [&sampler](std::mt19937_64& rng) {
    return sampler.second_term_shot(rng);
  });
  est.kappa = sampler.kappa();
  est.g_norm = sampler.g_norm();
  return est;
}

EncodingMeta be_product(const EncodingMeta& a, const EncodingMeta& b) {
  return {a.alpha * b.alpha, a.ancillas + b.ancillas,
          a.alpha * b.delta + b.alpha * a.delta + a.delta * b.delta};
}

double error_budget(double eps1, double eps2, double kappa, double g_norm) {
  const double rk = std::sqrt(kappa);
  return g_norm * (2.0 * rk * eps2 + 2.0 * eps1 * (kappa + rk * eps2));
}

BudgetSplit budget_split(double epsilon, double kappa, double g_norm) {
  if (!(epsilon > 0.0) || !(kappa >= 1.0) || !(g_norm > 0.0)) {
    throw InputError("budget_split needs epsilon > 0, kappa >= 1, g_norm > 0");
  }
  BudgetSplit out;
  out.eps2 = epsilon / (8.0 * std::sqrt(kappa) * g_norm);
  out.eps1 = epsilon / (8.0 * g_norm * (kappa + std::sqrt(kappa) * out.eps2));
  return out;
}

double query_cost(QueryKind kind, double kappa, double s, double g_norm, double epsilon,
                  double delta) {
  if (!(kappa >= 1.0) || !(epsilon > 0.0)) throw InputError("query_cost needs kappa >= 1, eps > 0");
  switch (kind) {
    case QueryKind::ModularFlow: {
      const double as = std::abs(s);
      if (as == 0.0) return 1.0;
      return std::max(1.0, kappa * as * std::log(std::numbers::e + as / epsilon) *
                               std::log(std::numbers::e + kappa));
    }
    case QueryKind::InvSqrt:
      if (!(epsilon < 1.0)) throw InputError("inverse square root cost needs epsilon < 1");
      return kappa * std::log(1.0 / epsilon);
    case QueryKind::FullAlgorithm: {
      if (!(g_norm > 0.0) || !(delta > 0.0 && delta < 1.0)) {
        throw InputError("full cost needs g_norm > 0 and delta in (0, 1)");
      }
      const double ratio = kappa * g_norm / epsilon;
      if (!(ratio > 1.0)) throw InputError("full cost needs kappa g / epsilon > 1");
      return kappa * kappa * kappa * g_norm * g_norm / (epsilon * epsilon) * std::log(ratio) *
             std::log(1.0 / delta);
    }
  }
  return 0.0;
}

}  // namespace qbm::estimator
