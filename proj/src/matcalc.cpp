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

#include "qbmgrad/matcalc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qbmgrad/errors.hpp"
#include "qbmgrad/quadrature.hpp"

namespace qbm::matcalc {

namespace {

constexpr double kDegenerateGap = 1e-10;

// A node set with the density folded into the weights; only even integrands
// are evaluated, so the rule covers [0, T] with doubled weights.
struct WeightedRule {
  std::vector<double> t;
  std::vector<double> w;
};

WeightedRule weighted_rule(const ChannelKind& kind, const EvalMode& mode) {
  if (mode.nodes < 64) throw InputError("quadrature needs at least 64 nodes");
  if (!(mode.horizon > 0.0)) throw InputError("quadrature horizon must be positive");
  WeightedRule out;
  if (kind.tag == ChannelTag::ExpTent) {
    const quad::Rule rule = quad::tanh_sinh(0.0, mode.horizon, mode.nodes / 2);
    const Density d = Density::high_peak_tent();
    for (std::size_t i = 0; i < rule.size(); ++i) {
      out.t.push_back(rule.nodes[i]);
      out.w.push_back(2.0 * rule.weights[i] * pdf(d, rule.nodes[i]));
    }
    return out;
  }
  const Density d = kind.tag == ChannelTag::LogLogistic ? Density::logistic()
                                                        : Density::beta_r(kind.r);
  const quad::Rule rule = quad::trapezoid(-mode.horizon, mode.horizon, mode.nodes);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (rule.nodes[i] < 0.0) continue;
    const double mult = rule.nodes[i] == 0.0 ? 1.0 : 2.0;
    out.t.push_back(rule.nodes[i]);
    out.w.push_back(mult * rule.weights[i] * pdf(d, rule.nodes[i]));
  }
  return out;
}

double rule_factor(const WeightedRule& rule, double omega) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.t.size(); ++i) sum += rule.w[i] * std::cos(omega * rule.t[i]);
  return sum;
}

bool identity_channel(const ChannelKind& kind) {
  return kind.tag == ChannelTag::PowerBeta && kind.r == -1.0;
}

void require_positive(const SpectralDecomposition& anchor) {
  if (!(anchor.min() > 0.0)) {
    throw NumericalError("channel anchor must be positive definite (min eigenvalue " +
                         std::to_string(anchor.min()) + ")");
  }
}

}  // namespace

ChannelKind ChannelKind::power_beta(double r) {
  if (!(r >= -1.0 && r < 1.0) || r == 0.0) {
    throw InputError("PowerBeta channel needs r in [-1, 1) \\ {0}, got " + std::to_string(r));
  }
  return {ChannelTag::PowerBeta, r};
}

std::string ChannelKind::name() const {
  switch (tag) {
    case ChannelTag::ExpTent:
      return "exp_tent";
    case ChannelTag::LogLogistic:
      return "log_logistic";
    case ChannelTag::PowerBeta:
      return "power_beta(" + std::to_string(r) + ")";
  }
  return "unknown";
}

EvalMode EvalMode::quadrature(double horizon, int nodes) {
  if (nodes < 64) throw InputError("quadrature needs at least 64 nodes");
  if (!(horizon > 0.0)) throw InputError("quadrature horizon must be positive");
  return {Tag::Quadrature, horizon, nodes};
}

double channel_factor(const ChannelKind& kind, double u) {
  if (u == 0.0) return 1.0;
  const double b = 0.5 * std::abs(u);
  switch (kind.tag) {
    case ChannelTag::ExpTent:
      return std::tanh(b) / b;
    case ChannelTag::LogLogistic:
      // b / sinh(b) without overflow
      return 2.0 * b * std::exp(-b) / -std::expm1(-2.0 * b);
    case ChannelTag::PowerBeta: {
      const double a = std::abs(kind.r) * b;
      // sinh(a) / sinh(b) = e^{a-b} (1 - e^{-2a}) / (1 - e^{-2b})
      return std::exp(a - b) * std::expm1(-2.0 * a) / std::expm1(-2.0 * b) / std::abs(kind.r);
    }
  }
  return 1.0;
}

double channel_factor_quadrature(const ChannelKind& kind, double u, const EvalMode& mode) {
  if (identity_channel(kind)) return 1.0;
  const WeightedRule rule = weighted_rule(kind, mode);
  return rule_factor(rule, kind.uses_log_gap() ? 0.5 * u : u);
}

RMatrix factor_matrix(const ChannelKind& kind, const SpectralDecomposition& anchor,
                      const EvalMode& mode) {
  const int d = anchor.dim();
  if (identity_channel(kind)) return RMatrix::Ones(d, d);
  if (kind.uses_log_gap()) require_positive(anchor);
  const double scale = std::max(1.0, anchor.values.cwiseAbs().maxCoeff());
  WeightedRule rule;
  if (mode.tag == EvalMode::Tag::Quadrature) rule = weighted_rule(kind, mode);
  RMatrix f(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l <= k; ++l) {
      const double lk = anchor.values(k);
      const double ll = anchor.values(l);
      double value = 1.0;
      if (std::abs(lk - ll) >= kDegenerateGap * scale) {
        const double gap = kind.uses_log_gap() ? std::log(lk) - std::log(ll) : lk - ll;
        if (mode.tag == EvalMode::Tag::Spectral) {
          value = channel_factor(kind, gap);
        } else {
          value = rule_factor(rule, kind.uses_log_gap() ? 0.5 * gap : gap);
        }
      } else if (mode.tag == EvalMode::Tag::Quadrature) {
        value = rule_factor(rule, 0.0);
      }
      f(k, l) = value;
      f(l, k) = value;
    }
  }
  return f;
}

CMatrix apply_in_eigenbasis(const ChannelKind& kind, const SpectralDecomposition& anchor,
                            const CMatrix& y, const EvalMode& mode) {
  if (y.rows() != anchor.dim() || y.cols() != anchor.dim()) {
    throw InputError("channel argument does not match anchor dimension");
  }
  return y.cwiseProduct(factor_matrix(kind, anchor, mode).cast<Complex>());
}

CMatrix apply_channel(const ChannelKind& kind, const SpectralDecomposition& anchor,
                      const CMatrix& y, const EvalMode& mode) {
  return anchor.from_eigenbasis(apply_in_eigenbasis(kind, anchor, anchor.to_eigenbasis(y), mode));
}

HermitianOperator apply_channel(const ChannelKind& kind, const SpectralDecomposition& anchor,
                                const HermitianOperator& y, const EvalMode& mode) {
  return HermitianOperator::from_computed(apply_channel(kind, anchor, y.matrix(), mode));
}

HermitianOperator frechet_exp(const HermitianOperator& b, const HermitianOperator& h,
                              ExpPath path) {
  if (b.dim() != h.dim()) throw InputError("frechet_exp: dimension mismatch");
  const SpectralDecomposition spec = eigh(b);
  if (path == ExpPath::Fourier) {
    const CMatrix phi = apply_channel(ChannelKind::exp_tent(), spec, h.matrix());
    const CMatrix eb = matrix_function(spec, [](double x) { return std::exp(x); }).matrix();
    return HermitianOperator::from_computed(0.5 * (phi * eb + eb * phi));
  }
  // int_0^1 e^{tB} H e^{(1-t)B} dt
  const quad::Rule rule = quad::gauss_legendre64(0.0, 1.0);
  CMatrix acc = CMatrix::Zero(b.dim(), b.dim());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double t = rule.nodes[i];
    const CMatrix left = matrix_function(spec, [t](double x) { return std::exp(t * x); }).matrix();
    const CMatrix right =
        matrix_function(spec, [t](double x) { return std::exp((1.0 - t) * x); }).matrix();
    acc += rule.weights[i] * (left * h.matrix() * right);
  }
  return HermitianOperator::from_computed(acc);
}

namespace {

// int_0^inf s^r (A+s)^{-1} H (A+s)^{-1} ds in the eigenbasis of A, via s = e^y.
CMatrix resolvent_integral(const SpectralDecomposition& spec, const CMatrix& h_eig, double r) {
  const int d = spec.dim();
  const double lo = std::log(spec.min()) - 40.0 / (1.0 + r);
  const double hi = std::log(spec.max()) + 40.0 / (1.0 - r);
  const int n = static_cast<int>(std::ceil((hi - lo) / 0.02)) + 1;
  const quad::Rule rule = quad::trapezoid(lo, hi, n);
  RMatrix kernel = RMatrix::Zero(d, d);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double y = rule.nodes[i];
    // log(lambda + e^y) without overflow at large y.
    RVector log_shift(d);
    for (int k = 0; k < d; ++k) {
      const double ll = std::log(spec.values(k));
      log_shift(k) = std::max(ll, y) + std::log1p(std::exp(-std::abs(ll - y)));
    }
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        kernel(k, l) += rule.weights[i] * std::exp((1.0 + r) * y - log_shift(k) - log_shift(l));
  }
  return h_eig.cwiseProduct(kernel.cast<Complex>());
}

}  // namespace

HermitianOperator frechet_log(const HermitianOperator& a, const HermitianOperator& h,
                              LogPath path) {
  if (a.dim() != h.dim()) throw InputError("frechet_log: dimension mismatch");
  const SpectralDecomposition spec = eigh(a);
  require_positive(spec);
  const CMatrix h_eig = spec.to_eigenbasis(h.matrix());
  CMatrix out;
  if (path == LogPath::Fourier) {
    out = apply_in_eigenbasis(ChannelKind::log_logistic(), spec, h_eig);
    const RVector inv_sqrt = spec.values.cwiseSqrt().cwiseInverse();
    out = inv_sqrt.cast<Complex>().asDiagonal() * out * inv_sqrt.cast<Complex>().asDiagonal();
  } else {
    out = resolvent_integral(spec, h_eig, 0.0);
  }
  return HermitianOperator::from_computed(spec.from_eigenbasis(out));
}

HermitianOperator frechet_power(const HermitianOperator& a, const HermitianOperator& h, double r,
                                LogPath path) {
  if (a.dim() != h.dim()) throw InputError("frechet_power: dimension mismatch");
  const ChannelKind kind = ChannelKind::power_beta(r);
  const SpectralDecomposition spec = eigh(a);
  require_positive(spec);
  const CMatrix h_eig = spec.to_eigenbasis(h.matrix());
  CMatrix out;
  if (path == LogPath::Fourier || r == -1.0) {
    out = apply_in_eigenbasis(kind, spec, h_eig);
    RVector side(spec.dim());
    for (int k = 0; k < spec.dim(); ++k) side(k) = std::pow(spec.values(k), 0.5 * (r - 1.0));
    out = r * (side.cast<Complex>().asDiagonal() * out * side.cast<Complex>().asDiagonal());
  } else {
    out = (std::sin(std::numbers::pi * r) / std::numbers::pi) * resolvent_integral(spec, h_eig, r);
  }
  return HermitianOperator::from_computed(spec.from_eigenbasis(out));
}

HermitianOperator thermal_derivative(const SpectralDecomposition& g_spec,
                                     const HermitianOperator& dg) {
  if (dg.dim() != g_spec.dim()) throw InputError("thermal_derivative: dimension mismatch");
  RVector p = (-(g_spec.values.array() - g_spec.min())).exp();
  p /= p.sum();
  const CMatrix dg_eig = g_spec.to_eigenbasis(dg.matrix());
  const CMatrix phi = apply_in_eigenbasis(ChannelKind::exp_tent(), g_spec, dg_eig);
  const double mean = (p.cast<Complex>().asDiagonal() * dg_eig).trace().real();
  CMatrix out(g_spec.dim(), g_spec.dim());
  for (int k = 0; k < g_spec.dim(); ++k)
    for (int l = 0; l < g_spec.dim(); ++l)
      out(k, l) = -0.5 * (p(k) + p(l)) * phi(k, l) + (k == l ? p(k) * mean : 0.0);
  return HermitianOperator::from_computed(g_spec.from_eigenbasis(out));
}

}  // namespace qbm::matcalc
