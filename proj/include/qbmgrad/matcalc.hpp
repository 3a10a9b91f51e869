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

#include <string>

#include "qbmgrad/densities.hpp"
#include "qbmgrad/linalg.hpp"

namespace qbm::matcalc {

// Quantum channels diagonal in the eigenbasis of an anchor operator. Entry
// (k, l) of the argument, expressed in that eigenbasis, is scaled by
// channel_factor(kind, gap_kl).
//   ExpTent      gap = l_k - l_l        factor tanh(u/2) / (u/2)
//   LogLogistic  gap = ln(l_k / l_l)    factor (u/2) / sinh(u/2)
//   PowerBeta    gap = ln(l_k / l_l)    factor sinh(r u/2) / (r sinh(u/2))
// ExpTent conjugates by e^{-iAt} averaged against the high-peak tent density,
// the other two conjugate by A^{-it/2} averaged against the logistic and
// BetaR(r) densities. PowerBeta(-1) is the identity channel.
enum class ChannelTag { ExpTent, LogLogistic, PowerBeta };

struct ChannelKind {
  ChannelTag tag = ChannelTag::ExpTent;
  double r = 0.0;

  static ChannelKind exp_tent() { return {ChannelTag::ExpTent, 0.0}; }
  static ChannelKind log_logistic() { return {ChannelTag::LogLogistic, 0.0}; }
  static ChannelKind power_beta(double r);

  bool uses_log_gap() const { return tag != ChannelTag::ExpTent; }
  std::string name() const;
};

struct EvalMode {
  enum class Tag { Spectral, Quadrature };
  Tag tag = Tag::Spectral;
  double horizon = 10.0;
  int nodes = 4096;

  static EvalMode spectral() { return {}; }
  static EvalMode quadrature(double horizon = 10.0, int nodes = 4096);
};

double channel_factor(const ChannelKind& kind, double u);

// The same factor from the defining time integral, truncated at the horizon.
double channel_factor_quadrature(const ChannelKind& kind, double u, const EvalMode& mode);

// Factor matrix F with F(k, l) the channel factor of eigenpair (k, l).
RMatrix factor_matrix(const ChannelKind& kind, const SpectralDecomposition& anchor,
                      const EvalMode& mode = EvalMode::spectral());

// Channel applied to a matrix already expressed in the anchor eigenbasis.
CMatrix apply_in_eigenbasis(const ChannelKind& kind, const SpectralDecomposition& anchor,
                            const CMatrix& y, const EvalMode& mode = EvalMode::spectral());

CMatrix apply_channel(const ChannelKind& kind, const SpectralDecomposition& anchor,
                      const CMatrix& y, const EvalMode& mode = EvalMode::spectral());
HermitianOperator apply_channel(const ChannelKind& kind, const SpectralDecomposition& anchor,
                                const HermitianOperator& y,
                                const EvalMode& mode = EvalMode::spectral());

enum class ExpPath { Duhamel, Fourier };
enum class LogPath { Fourier, Resolvent };

// Directional derivative of e^B along H.
HermitianOperator frechet_exp(const HermitianOperator& b, const HermitianOperator& h,
                              ExpPath path = ExpPath::Fourier);
// Directional derivative of ln A along H, A positive definite.
HermitianOperator frechet_log(const HermitianOperator& a, const HermitianOperator& h,
                              LogPath path = LogPath::Fourier);
// Directional derivative of A^r along H, r in [-1, 1) \ {0}.
HermitianOperator frechet_power(const HermitianOperator& a, const HermitianOperator& h, double r,
                                LogPath path = LogPath::Fourier);

// Derivative of the thermal state e^{-G} / Tr e^{-G} along dG.
HermitianOperator thermal_derivative(const SpectralDecomposition& g_spec,
                                     const HermitianOperator& dg);

}  // namespace qbm::matcalc
