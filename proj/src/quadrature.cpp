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

#include "qbmgrad/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "qbmgrad/errors.hpp"

namespace qbm::quad {

namespace {

template <unsigned N>
void append_gauss(Rule& rule, double a, double b) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rule.nodes.push_back(mid);
      rule.weights.push_back(half * w[i]);
      continue;
    }
    rule.nodes.push_back(mid - half * x[i]);
    rule.weights.push_back(half * w[i]);
    rule.nodes.push_back(mid + half * x[i]);
    rule.weights.push_back(half * w[i]);
  }
}

}  // namespace

Rule gauss_legendre64(double a, double b) {
  Rule rule;
  append_gauss<64>(rule, a, b);
  return rule;
}

Rule composite_gauss(double a, double b, int panels) {
  if (panels < 1) throw InputError("composite_gauss needs at least one panel");
  Rule rule;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) append_gauss<16>(rule, a + p * h, a + (p + 1) * h);
  return rule;
}

Rule trapezoid(double a, double b, int n) {
  if (n < 2) throw InputError("trapezoid rule needs at least two nodes");
  Rule rule;
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(a + i * h);
    rule.weights.push_back((i == 0 || i == n - 1) ? 0.5 * h : h);
  }
  return rule;
}

Rule tanh_sinh(double a, double b, int n) {
  if (n < 8) throw InputError("tanh_sinh rule needs at least 8 nodes");
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  // Beyond |k h| = 4 the weights are below 1e-35 of the interval length.
  const int half = n / 2;
  const double h = 4.0 / half;
  const double r = 0.5 * (b - a);
  Rule rule;
  for (int k = -half; k <= half; ++k) {
    const double tau = k * h;
    const double u = kHalfPi * std::sinh(tau);
    const double ch = std::cosh(u);
    // 1 - tanh(u) computed without cancellation for large u.
    const double one_minus = 2.0 / (std::exp(2.0 * std::abs(u)) + 1.0);
    const double w = r * h * kHalfPi * std::cosh(tau) / (ch * ch);
    double x;
    if (u >= 0) {
      x = b - r * one_minus;
    } else {
      x = a + r * one_minus;
    }
    if (!(x > a && x < b) || w == 0.0) continue;
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
  }
  return rule;
}

}  // namespace qbm::quad
