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

#include "qbmgrad/densities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "qbmgrad/errors.hpp"
#include "qbmgrad/quadrature.hpp"

namespace qbm {

namespace {

constexpr double kPi = std::numbers::pi;

// ln coth(x) for x > 0.
double log_coth(double x) { return std::log1p(2.0 / std::expm1(2.0 * x)); }

// ln(x coth x), smooth and even, zero at the origin.
double log_x_coth(double x) {
  if (x == 0.0) return 0.0;
  if (x > 20.0) return std::log(x) + log_coth(x);
  return std::log(x / std::tanh(x));
}

// Integral of the high-peak tent density over [0, t], t small.
double tent_head_mass(double t) {
  const double x = 0.5 * kPi * t;
  const quad::Rule rule = quad::gauss_legendre64(0.0, t);
  double smooth = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    smooth += rule.weights[i] * log_x_coth(0.5 * kPi * rule.nodes[i]);
  }
  return (2.0 / kPi) * (t - t * std::log(x) + smooth);
}

double tent_upper_tail(double t) {
  if (t < 0.25) return 0.5 - tent_head_mass(t);
  // (4 / pi^2) sum over odd k of exp(-k pi t) / k^2
  const double q = std::exp(-kPi * t);
  double qk = q;
  const double q2 = q * q;
  double sum = 0.0;
  for (int k = 1; k < 2000; k += 2) {
    const double term = qk / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
    qk *= q2;
  }
  return 4.0 / (kPi * kPi) * sum;
}

double beta_r_upper_tail(double r, double t) {
  const double a = std::tan(0.5 * kPi * r);
  const double x = 0.5 * kPi * t;
  const double th = std::tanh(x);
  const double one_minus = 2.0 / (std::exp(2.0 * x) + 1.0);
  return std::atan(a * one_minus / (1.0 + a * a * th)) / (kPi * r);
}

}  // namespace

Density Density::beta_r(double r) {
  if (!(std::abs(r) > 0.0 && std::abs(r) < 1.0)) {
    throw InputError("BetaR density needs 0 < |r| < 1, got r = " + std::to_string(r));
  }
  return {DensityKind::BetaR, r};
}

std::string Density::name() const {
  switch (kind) {
    case DensityKind::HighPeakTent:
      return "high_peak_tent";
    case DensityKind::Logistic:
      return "logistic";
    case DensityKind::BetaR:
      return "beta_r(" + std::to_string(r) + ")";
  }
  return "unknown";
}

double pdf(const Density& d, double t) {
  switch (d.kind) {
    case DensityKind::HighPeakTent:
      if (t == 0.0) throw InputError("high-peak tent density is singular at t = 0");
      return (2.0 / kPi) * log_coth(0.5 * kPi * std::abs(t));
    case DensityKind::Logistic: {
      const double c = std::cosh(0.5 * kPi * t);
      return 0.25 * kPi / (c * c);
    }
    case DensityKind::BetaR:
      return std::sin(kPi * d.r) / (2.0 * d.r * (std::cosh(kPi * t) + std::cos(kPi * d.r)));
  }
  return 0.0;
}

double upper_tail(const Density& d, double t) {
  if (t < 0.0) throw InputError("upper_tail expects t >= 0");
  switch (d.kind) {
    case DensityKind::HighPeakTent:
      return t == 0.0 ? 0.5 : tent_upper_tail(t);
    case DensityKind::Logistic:
      return 1.0 / (std::exp(kPi * t) + 1.0);
    case DensityKind::BetaR:
      return beta_r_upper_tail(d.r, t);
  }
  return 0.0;
}

double cdf(const Density& d, double t) {
  if (t >= 0.0) return 1.0 - upper_tail(d, t);
  return upper_tail(d, -t);
}

double tail_mass_bound(const Density& d, double horizon) {
  switch (d.kind) {
    case DensityKind::HighPeakTent:
      if (!(horizon > std::log(2.0) / kPi)) {
        throw InputError("tent tail bound needs horizon > ln(2)/pi");
      }
      return 16.0 / (kPi * kPi) * std::exp(-kPi * horizon);
    case DensityKind::Logistic:
      if (!(horizon > 0.0)) throw InputError("tail bound needs a positive horizon");
      return 2.0 * std::exp(-kPi * horizon);
    case DensityKind::BetaR: {
      if (!(horizon > std::log(2.0) / kPi)) {
        throw InputError("BetaR tail bound needs horizon > ln(2)/pi");
      }
      // cosh(pi t) + cos(pi r) >= (e^{pi t} / 2)(1 - 2 m e^{-pi T}) on t >= T,
      // with m = max(0, -cos(pi r)).
      const double m = std::max(0.0, -std::cos(kPi * d.r));
      const double e = std::exp(-kPi * horizon);
      const double sinc = std::sin(kPi * d.r) / (kPi * d.r);
      return 2.0 * sinc * e / (1.0 - 2.0 * m * e);
    }
  }
  return 0.0;
}

double tail_mass_numeric(const Density& d, double horizon) {
  if (!(horizon > 0.0)) throw InputError("tail mass needs a positive horizon");
  boost::math::quadrature::exp_sinh<double> integrator;
  const auto f = [&d](double t) { return pdf(d, t); };
  return 2.0 * integrator.integrate(f, horizon, std::numeric_limits<double>::infinity(), 1e-13);
}

double total_mass_numeric(const Density& d) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const auto f = [&d](double t) { return pdf(d, t); };
  const double inf = std::numeric_limits<double>::infinity();
  if (d.kind != DensityKind::HighPeakTent) {
    return 2.0 * integrator.integrate(f, 0.0, inf, 1e-13);
  }
  // Split at 1e-6; below it the density is (2/pi)(-ln(pi t / 2)) + O(t^2).
  constexpr double eps = 1e-6;
  const double head = (2.0 / kPi) * (eps - eps * std::log(0.5 * kPi * eps));
  const quad::Rule mid = quad::tanh_sinh(eps, 1.0, 400);
  double body = 0.0;
  for (std::size_t i = 0; i < mid.size(); ++i) body += mid.weights[i] * f(mid.nodes[i]);
  body += integrator.integrate(f, 1.0, inf, 1e-13);
  return 2.0 * (head + body);
}

double fourier_transform_numeric(const Density& d, double omega) {
  double sum = 0.0;
  const auto add = [&](const quad::Rule& rule) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      sum += rule.weights[i] * pdf(d, rule.nodes[i]) * std::cos(omega * rule.nodes[i]);
    }
  };
  if (d.kind == DensityKind::HighPeakTent) {
    add(quad::tanh_sinh(0.0, 1.0, 600));
    add(quad::composite_gauss(1.0, 40.0, 400));
  } else {
    add(quad::composite_gauss(0.0, 40.0, 400));
  }
  return 2.0 * sum;
}

double g_r(double r, double t) {
  return std::sin(kPi * r) / (2.0 * (std::cosh(kPi * t) + std::cos(kPi * r)));
}

double verify_contour_lemma(double r, double u) {
  if (!(std::abs(r) < 1.0)) throw InputError("contour check needs |r| < 1");
  const quad::Rule rule = quad::composite_gauss(0.0, 12.0, 192);
  double integral = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    integral += rule.weights[i] * g_r(r, rule.nodes[i]) * std::cos(0.5 * u * rule.nodes[i]);
  }
  integral *= 2.0;
  const double target = (u == 0.0) ? r : std::sinh(0.5 * r * u) / std::sinh(0.5 * u);
  return std::abs(integral - target);
}

double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the tent upper tail on a log-spaced grid, refined by Newton steps
// on the exact tail function.
class InverseCdfTable {
 public:
  static constexpr int kPoints = 10000;
  static constexpr double kTMin = 1e-12;
  static constexpr double kTMax = 20.0;

  InverseCdfTable() : log_t_(kPoints), tail_(kPoints) {
    const double a = std::log(kTMin);
    const double b = std::log(kTMax);
    for (int i = 0; i < kPoints; ++i) {
      log_t_[i] = a + (b - a) * i / (kPoints - 1);
      tail_[i] = tent_upper_tail(std::exp(log_t_[i]));
    }
  }

  // t > 0 with P(T > t) = p, for p in (0, 1/2).
  double invert(double p) const {
    if (p >= tail_.front()) return invert_head(p);
    // tail_ is decreasing; find i with tail_[i] > p >= tail_[i + 1].
    const auto it = std::lower_bound(tail_.begin(), tail_.end(), p, std::greater<double>());
    int hi = static_cast<int>(it - tail_.begin());
    if (hi >= kPoints) return std::exp(log_t_.back());
    if (hi == 0) hi = 1;
    const int lo = hi - 1;
    const double f = (p - tail_[lo]) / (tail_[hi] - tail_[lo]);
    double lo_t = std::exp(log_t_[lo]);
    double hi_t = std::exp(log_t_[hi]);
    double t = std::exp(log_t_[lo] + f * (log_t_[hi] - log_t_[lo]));
    for (int iter = 0; iter < 4; ++iter) {
      const double resid = tent_upper_tail(t) - p;
      if (resid > 0) {
        lo_t = t;
      } else {
        hi_t = t;
      }
      double next = t + resid / pdf(Density::high_peak_tent(), t);
      if (!(next > lo_t && next < hi_t)) next = 0.5 * (lo_t + hi_t);
      if (std::abs(next - t) <= 1e-15 * t) {
        t = next;
        break;
      }
      t = next;
    }
    return t;
  }

 private:
  // Below kTMin the head mass is (2/pi) t (1 - ln(pi t / 2)) to double precision.
  static double invert_head(double p) {
    const double target = 0.5 - p;
    double lo = 0.0;
    double hi = kTMin;
    for (int i = 0; i < 200 && hi - lo > 1e-300; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double mass = (2.0 / kPi) * mid * (1.0 - std::log(0.5 * kPi * mid));
      if (mass < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  std::vector<double> log_t_;
  std::vector<double> tail_;
};

namespace {

std::shared_ptr<const InverseCdfTable> tent_table() {
  static const std::shared_ptr<const InverseCdfTable> table =
      std::make_shared<const InverseCdfTable>();
  return table;
}

}  // namespace

SeededSampler::SeededSampler(const Density& d, std::uint64_t seed)
    : density_(d), seed_(seed), rng_(seed) {
  if (d.kind == DensityKind::BetaR) Density::beta_r(d.r);
  if (d.kind == DensityKind::HighPeakTent) table_ = tent_table();
}

double SeededSampler::operator()() { return draw(rng_); }

std::vector<double> SeededSampler::sample(std::size_t n) {
  std::vector<double> out(n);
  for (auto& x : out) x = draw(rng_);
  return out;
}

double SeededSampler::draw(std::mt19937_64& rng) const {
  switch (density_.kind) {
    case DensityKind::Logistic: {
      const double u = open_uniform(rng);
      return (2.0 / kPi) * std::atanh(2.0 * u - 1.0);
    }
    case DensityKind::BetaR: {
      const double u = open_uniform(rng);
      const double r = density_.r;
      const double z = std::tan(kPi * r * (u - 0.5)) / std::tan(0.5 * kPi * r);
      return (2.0 / kPi) * std::atanh(z);
    }
    case DensityKind::HighPeakTent: {
      const std::uint64_t bits = rng();
      const double p = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-54;
      const double t = table_->invert(p);
      return (bits & 1u) ? t : -t;
    }
  }
  return 0.0;
}

double ks_statistic(const Density& d, std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(d, sample[i]);
    stat = std::max({stat, f - i / n, (i + 1) / n - f});
  }
  return stat;
}

}  // namespace qbm
