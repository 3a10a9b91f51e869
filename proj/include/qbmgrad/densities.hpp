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
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace qbm {

// The three even probability densities on the real line whose Fourier
// transforms are the divided-difference factors of exp, log and x^r:
//   HighPeakTent  (2/pi) ln|coth(pi t / 2)|         log singularity at 0
//   Logistic      pi / (2 (cosh(pi t) + 1))
//   BetaR         sin(pi r) / (2 r (cosh(pi t) + cos(pi r))),  0 < |r| < 1
enum class DensityKind { HighPeakTent, Logistic, BetaR };

struct Density {
  DensityKind kind = DensityKind::Logistic;
  double r = 0.0;

  static Density high_peak_tent() { return {DensityKind::HighPeakTent, 0.0}; }
  static Density logistic() { return {DensityKind::Logistic, 0.0}; }
  static Density beta_r(double r);

  std::string name() const;
};

double pdf(const Density& d, double t);
double cdf(const Density& d, double t);
// P(T > t) for t >= 0; accurate far into the tail.
double upper_tail(const Density& d, double t);

// Analytic bound on P(|T| > horizon).
double tail_mass_bound(const Density& d, double horizon);
// P(|T| > horizon) by numerical quadrature of the density.
double tail_mass_numeric(const Density& d, double horizon);
// Integral of the density over the real line by quadrature.
double total_mass_numeric(const Density& d);
// Integral of pdf(t) exp(-i omega t) over the real line by quadrature.
double fourier_transform_numeric(const Density& d, double omega);

// r * BetaR(r) density, the kernel whose Fourier transform at u/2 is
// sinh(r u / 2) / sinh(u / 2).
double g_r(double r, double t);

// |int_{-12}^{12} g_r(t) e^{-i u t / 2} dt - sinh(r u / 2) / sinh(u / 2)|.
double verify_contour_lemma(double r, double u);

// Uniform double in the open interval (0, 1) from 53 random bits.
double open_uniform(std::mt19937_64& rng);

class InverseCdfTable;

// Seeded inverse-transform sampler. Identical seeds produce identical
// streams; zero is never emitted.
class SeededSampler {
 public:
  SeededSampler(const Density& d, std::uint64_t seed);

  double operator()();
  double draw(std::mt19937_64& rng) const;
  std::vector<double> sample(std::size_t n);

  const Density& density() const { return density_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Density density_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::shared_ptr<const InverseCdfTable> table_;
};

// Kolmogorov-Smirnov statistic of a sample against the density's CDF.
double ks_statistic(const Density& d, std::vector<double> sample);

}  // namespace qbm
