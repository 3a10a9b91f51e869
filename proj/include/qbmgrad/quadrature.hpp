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

namespace qbm::quad {

// Fixed node/weight rule on an interval.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// 64-point Gauss-Legendre on [a, b].
Rule gauss_legendre64(double a, double b);

// Composite 16-point Gauss-Legendre with equal panels.
Rule composite_gauss(double a, double b, int panels);

// Composite trapezoid with n >= 2 equispaced nodes including both endpoints.
Rule trapezoid(double a, double b, int n);

// Double-exponential rule with about n nodes, all strictly inside (a, b).
// Integrable endpoint singularities (logarithmic, algebraic) are handled.
Rule tanh_sinh(double a, double b, int n);

}  // namespace qbm::quad
