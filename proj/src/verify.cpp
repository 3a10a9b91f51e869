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

#include "qbmgrad/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qbmgrad/densities.hpp"
#include "qbmgrad/errors.hpp"
#include "qbmgrad/estimator.hpp"
#include "qbmgrad/gradients.hpp"
#include "qbmgrad/instances.hpp"
#include "qbmgrad/matcalc.hpp"
#include "qbmgrad/quadrature.hpp"
#include "qbmgrad/trainer.hpp"

namespace qbm::verify {

namespace {

using matcalc::ChannelKind;
using matcalc::EvalMode;

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}

  void add(const std::string& check, double tolerance, const std::function<double()>& residual,
           bool statistical = false) {
    Check c{name_, check, std::numeric_limits<double>::infinity(), tolerance, false, statistical};
    try {
      c.residual = residual();
      c.passed = std::isfinite(c.residual) && c.residual <= tolerance;
    } catch (const std::exception&) {
      c.passed = false;
    }
    checks_.push_back(c);
  }

  std::vector<Check> take() { return std::move(checks_); }

 private:
  std::string name_;
  std::vector<Check> checks_;
};

double max_abs(const CMatrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

HermitianOperator herm(const CMatrix& m) { return HermitianOperator::from_computed(m); }

HermitianOperator positive_operator(int d, std::mt19937_64& rng, double floor) {
  const CMatrix u = random_unitary(d, rng);
  std::uniform_real_distribution<double> unif(floor, 1.0);
  RVector l(d);
  for (int i = 0; i < d; ++i) l(i) = unif(rng);
  return herm(u * l.cast<Complex>().asDiagonal() * u.adjoint());
}

// Relative residual with a 1e-9 absolute floor folded in at the 1e-6 level.
double relative_residual(const RVector& a, const RVector& b) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double scale = std::max({std::abs(a(j)), std::abs(b(j)), 1e-3});
    worst = std::max(worst, std::abs(a(j) - b(j)) / scale);
  }
  return worst;
}

CMatrix fd_matrix(const std::function<CMatrix(double)>& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

std::vector<Check> matcalc_suite() {
  Suite s("matcalc");
  std::mt19937_64 rng(101);
  const int d = 4;
  const HermitianOperator h = herm(random_hermitian(d, rng, 2.0));
  const HermitianOperator y = herm(random_hermitian(d, rng));
  const HermitianOperator a = positive_operator(d, rng, 0.05);
  const SpectralDecomposition h_spec = eigh(h);
  const SpectralDecomposition a_spec = eigh(a);

  const auto dual = [&](const ChannelKind& k, const SpectralDecomposition& anchor) {
    return max_abs(matcalc::apply_channel(k, anchor, y.matrix()) -
                   matcalc::apply_channel(k, anchor, y.matrix(), EvalMode::quadrature()));
  };
  s.add("exp_tent_spectral_vs_quadrature", 1e-8, [&] { return dual(ChannelKind::exp_tent(), h_spec); });
  s.add("log_logistic_spectral_vs_quadrature", 1e-8,
        [&] { return dual(ChannelKind::log_logistic(), a_spec); });
  s.add("power_beta_spectral_vs_quadrature", 1e-8,
        [&] { return dual(ChannelKind::power_beta(0.5), a_spec); });

  s.add("channel_unital", 1e-12, [&] {
    const CMatrix id = CMatrix::Identity(d, d);
    return max_abs(matcalc::apply_channel(ChannelKind::exp_tent(), h_spec, id) - id);
  });
  s.add("channel_self_adjoint", 1e-12, [&] {
    const CMatrix x = random_hermitian(d, rng);
    const auto k = ChannelKind::log_logistic();
    return std::abs(trace_product(x, matcalc::apply_channel(k, a_spec, y.matrix())) -
                    trace_product(matcalc::apply_channel(k, a_spec, x), y.matrix()));
  });

  s.add("frechet_exp_duhamel_vs_fourier", 1e-8, [&] {
    return max_abs(matcalc::frechet_exp(h, y, matcalc::ExpPath::Duhamel).matrix() -
                   matcalc::frechet_exp(h, y, matcalc::ExpPath::Fourier).matrix());
  });
  s.add("frechet_exp_vs_finite_difference", 1e-6, [&] {
    const CMatrix fd = fd_matrix(
        [&](double e) { return CMatrix((h.matrix() + e * y.matrix()).exp()); }, 1e-5);
    return max_abs(matcalc::frechet_exp(h, y).matrix() - fd) / std::max(1.0, max_abs(fd));
  });
  s.add("frechet_log_fourier_vs_resolvent", 1e-8, [&] {
    return max_abs(matcalc::frechet_log(a, y, matcalc::LogPath::Fourier).matrix() -
                   matcalc::frechet_log(a, y, matcalc::LogPath::Resolvent).matrix());
  });
  s.add("frechet_log_vs_finite_difference", 1e-6, [&] {
    const CMatrix fd = fd_matrix(
        [&](double e) { return CMatrix((a.matrix() + e * y.matrix()).log()); }, 1e-6);
    return max_abs(matcalc::frechet_log(a, y).matrix() - fd) / std::max(1.0, max_abs(fd));
  });
  s.add("frechet_power_direct_vs_integral", 1e-8, [&] {
    return max_abs(matcalc::frechet_power(a, y, 0.3, matcalc::LogPath::Fourier).matrix() -
                   matcalc::frechet_power(a, y, 0.3, matcalc::LogPath::Resolvent).matrix());
  });
  s.add("frechet_power_vs_finite_difference", 1e-6, [&] {
    const CMatrix fd = fd_matrix(
        [&](double e) {
          return matrix_function(eigh(herm(a.matrix() + e * y.matrix())),
                                 [](double l) { return std::pow(l, 0.3); })
              .matrix();
        },
        1e-6);
    return max_abs(matcalc::frechet_power(a, y, 0.3).matrix() - fd) / std::max(1.0, max_abs(fd));
  });
  s.add("frechet_power_log_limit", 1e-4, [&] {
    const double r = 1e-6;
    return max_abs(matcalc::frechet_power(a, y, r).matrix() / r -
                   matcalc::frechet_log(a, y).matrix());
  });
  s.add("thermal_derivative_vs_finite_difference", 1e-6, [&] {
    const auto gibbs = [&](double e) {
      const CMatrix x = (-(h.matrix() + e * y.matrix())).exp();
      return CMatrix(x / x.trace());
    };
    const CMatrix fd = fd_matrix(gibbs, 1e-5);
    return max_abs(matcalc::thermal_derivative(h_spec, y).matrix() - fd);
  });
  return s.take();
}

std::vector<Check> densities_suite() {
  Suite s("densities");
  const Density tent = Density::high_peak_tent();
  const Density logistic = Density::logistic();
  const std::vector<Density> all{tent, logistic, Density::beta_r(0.5), Density::beta_r(-0.5)};

  for (const Density& d : all) {
    s.add("total_mass_" + d.name(), 1e-8, [d] { return std::abs(total_mass_numeric(d) - 1.0); });
  }
  s.add("contour_lemma_grid", 1e-8, [] {
    double worst = 0.0;
    for (double r : {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 0.9})
      for (double u : {0.0, 0.5, 1.0, 2.0, 5.0}) worst = std::max(worst, verify_contour_lemma(r, u));
    return worst;
  });
  for (const Density& d : {tent, logistic, Density::beta_r(0.5)}) {
    s.add("tail_numeric_within_bound_" + d.name(), 0.0, [d] {
      return std::max(0.0, tail_mass_numeric(d, 10.0) - tail_mass_bound(d, 10.0));
    });
  }
  s.add("cdf_matches_pdf_integral", 1e-12, [&] {
    double worst = 0.0;
    for (const Density& d : all) {
      for (auto [lo, hi] : {std::pair{0.05, 0.2}, std::pair{0.2, 0.7}, std::pair{0.7, 2.5}}) {
        const quad::Rule rule = quad::gauss_legendre64(lo, hi);
        double integral = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) integral += rule.weights[i] * pdf(d, rule.nodes[i]);
        worst = std::max(worst, std::abs(cdf(d, hi) - cdf(d, lo) - integral));
      }
      for (double t : {0.01, 0.4, 3.0}) worst = std::max(worst, std::abs(cdf(d, -t) + cdf(d, t) - 1.0));
    }
    return worst;
  });
  s.add("fourier_tent_closed_form", 1e-8, [&] {
    double worst = 0.0;
    for (double w : {0.5, 1.0, 2.0, 5.0}) {
      worst = std::max(worst, std::abs(fourier_transform_numeric(tent, w) - std::tanh(0.5 * w) / (0.5 * w)));
    }
    return worst;
  });
  s.add("fourier_logistic_closed_form", 1e-8, [&] {
    double worst = 0.0;
    for (double w : {0.5, 1.0, 2.0, 5.0}) {
      worst = std::max(worst, std::abs(fourier_transform_numeric(logistic, w) - w / std::sinh(w)));
    }
    return worst;
  });
  std::uint64_t seed = 202;
  for (const Density& d : {tent, logistic, Density::beta_r(0.5)}) {
    s.add("ks_sampler_" + d.name(), 0.01, [d, seed] {
      SeededSampler sampler(d, seed);
      return ks_statistic(d, sampler.sample(100000));
    }, true);
    ++seed;
  }
  return s.take();
}

// Exact classical gradient by enumeration over (v, h).
RVector enumerate_classical(const model::EnergyTable& t, const RVector& theta, const RVector& r) {
  RMatrix w(t.visible, t.hidden);
  for (int v = 0; v < t.visible; ++v)
    for (int h = 0; h < t.hidden; ++h) {
      double e = 0.0;
      for (int j = 0; j < t.num_params(); ++j) e += theta(j) * t.terms[j](v, h);
      w(v, h) = std::exp(-e);
    }
  const double z = w.sum();
  RVector out = RVector::Zero(t.num_params());
  for (int j = 0; j < t.num_params(); ++j)
    for (int v = 0; v < t.visible; ++v) {
      const double pv = w.row(v).sum();
      for (int h = 0; h < t.hidden; ++h) {
        out(j) += r(v) * w(v, h) / pv * t.terms[j](v, h) - w(v, h) / z * t.terms[j](v, h);
      }
    }
  return out;
}

std::vector<Check> gradients_suite() {
  Suite s("gradients");
  std::mt19937_64 rng(303);
  const BipartiteDims dims{2, 2};

  s.add("grad_vs_finite_difference", 1e-6, [&] {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto p = train::Problem::generic(instances::random_generic(dims, 3, rng),
                                             random_state(dims.visible, rng));
      const auto obj = grad::Objective::umegaki();
      worst = std::max(worst, relative_residual(p.gradient(p.initial_theta(), obj).values,
                                                train::finite_diff_gradient(p, p.initial_theta(), obj)));
    }
    return worst;
  });
  s.add("grad_qc_matches_generic", 1e-8, [&] {
    const auto inst = instances::random_qc(dims, 3, rng);
    const QuantumState rho = random_state(dims.visible, rng);
    const auto obj = grad::Objective::umegaki();
    const RVector a = grad::grad_qc(model::qc_decompose(inst.hamiltonian, inst.basis), rho, obj).values;
    const RVector b = grad::grad(model::ThermalModel::thermalize(inst.hamiltonian), rho, obj).values;
    return (a - b).cwiseAbs().maxCoeff();
  });
  s.add("grad_cq_matches_generic", 1e-8, [&] {
    const auto inst = instances::random_cq(dims, 3, rng);
    const RVector r = instances::random_probabilities(dims.visible, rng);
    const CMatrix rho = inst.basis * r.cast<Complex>().asDiagonal() * inst.basis.adjoint();
    const auto obj = grad::Objective::umegaki();
    const RVector a = grad::grad_cq(model::cq_decompose(inst.hamiltonian, inst.basis), r, obj).values;
    const RVector b = grad::grad(model::ThermalModel::thermalize(inst.hamiltonian),
                                 QuantumState(herm(rho)), obj)
                          .values;
    return (a - b).cwiseAbs().maxCoeff();
  });
  s.add("no_hidden_first_term", 1e-8, [&] {
    const auto h = instances::random_generic({3, 1}, 3, rng);
    const QuantumState rho = random_state(3, rng);
    const auto rep = grad::grad(model::ThermalModel::thermalize(h), rho, grad::Objective::umegaki());
    double worst = 0.0;
    for (int j = 0; j < h.num_params(); ++j) {
      worst = std::max(worst, std::abs(rep.first_terms(j) - expectation(h.terms()[j], rho)));
    }
    return worst;
  });
  s.add("classical_enumeration", 1e-10, [&] {
    const auto table = instances::random_table(4, 2, 3, rng);
    const RVector theta = RVector::Random(3);
    const RVector r = instances::random_probabilities(4, rng);
    const auto h = model::classical_to_param(table, theta);
    const auto rep = grad::grad(model::ThermalModel::thermalize(h), QuantumState::diagonal(r),
                                grad::Objective::umegaki());
    return (rep.values - enumerate_classical(table, theta, r)).cwiseAbs().maxCoeff();
  });
  for (double q : {0.5, 1.5, 2.0}) {
    s.add("tsallis_vs_finite_difference_q" + std::to_string(q).substr(0, 3), 1e-6, [&, q] {
      const auto p = train::Problem::generic(instances::random_generic(dims, 3, rng),
                                             random_state(dims.visible, rng));
      const auto obj = grad::Objective::petz_tsallis(q);
      return relative_residual(p.gradient(p.initial_theta(), obj).values,
                               train::finite_diff_gradient(p, p.initial_theta(), obj));
    });
  }
  s.add("tsallis_continuity_at_q1", 1e-3, [&] {
    const auto m = model::ThermalModel::thermalize(instances::random_generic(dims, 3, rng));
    const QuantumState rho = random_state(dims.visible, rng);
    const RVector u = grad::grad(m, rho, grad::Objective::umegaki()).values;
    double worst = 0.0;
    for (double q : {1.0 - 1e-4, 1.0 + 1e-4}) {
      worst = std::max(worst, (grad::grad(m, rho, grad::Objective::petz_tsallis(q)).values - u)
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    return worst;
  });
  s.add("fixed_point_zero_gradient", 1e-10, [&] {
    const auto m = model::ThermalModel::thermalize(instances::random_generic(dims, 3, rng));
    const QuantumState rho(herm(m.sigma_v()));
    return grad::grad(m, rho, grad::Objective::umegaki()).values.cwiseAbs().maxCoeff();
  });
  s.add("restricted_pack_roundtrip", 0.0, [] {
    const RVector a = RVector::LinSpaced(2, 1.0, 2.0);
    const RVector b = RVector::LinSpaced(3, 3.0, 5.0);
    const RMatrix w = RMatrix::Random(2, 3);
    const auto g = model::unpack_restricted(model::pack_restricted(a, b, w), 2, 3);
    return std::max({(g.a - a).cwiseAbs().maxCoeff(), (g.b - b).cwiseAbs().maxCoeff(),
                     (g.w - w).cwiseAbs().maxCoeff()});
  });
  s.add("pgm_povm_completeness", 1e-10, [&] {
    const auto inst = instances::random_qc(dims, 2, rng);
    const auto povm = grad::pgm_povm(model::qc_decompose(inst.hamiltonian, inst.basis));
    CMatrix sum = CMatrix::Zero(dims.visible, dims.visible);
    for (const auto& e : povm) sum += e.matrix();
    return max_abs(sum - CMatrix::Identity(dims.visible, dims.visible));
  });
  return s.take();
}

std::vector<Check> estimator_suite(int threads) {
  Suite s("estimator");
  std::mt19937_64 rng(404);
  const BipartiteDims dims{2, 2};
  const auto h = instances::random_generic(dims, 2, rng, 0.4);
  const auto m = model::ThermalModel::thermalize(h);
  const QuantumState rho = random_state(dims.visible, rng);
  const HermitianOperator& gj = h.terms()[0];
  const double exact_first = grad::grad(m, rho, grad::Objective::umegaki()).first_terms(0);

  s.add("dilation_unitary", 1e-12, [&] {
    const auto be = estimator::inv_sqrt_encoding(m);
    return max_abs(be.unitary.adjoint() * be.unitary -
                   CMatrix::Identity(be.unitary.rows(), be.unitary.cols()));
  });
  s.add("dilation_block", 1e-12, [&] {
    const CMatrix c = 0.9 * random_unitary(3, rng) * CMatrix(RVector::LinSpaced(3, 0.2, 1.0).cast<Complex>().asDiagonal());
    return max_abs(estimator::dilate(c, 2.0).encoded() - 2.0 * c);
  });
  s.add("circuit_matches_transformed_trace", 1e-10, [&] {
    double worst = 0.0;
    for (double st : {-1.3, 0.0, 0.7}) {
      worst = std::max(worst, std::abs(estimator::circuit_expectation(m, rho, gj, st, 0.4 * st) -
                                       estimator::transformed_trace(m, rho, gj, st, 0.4 * st)));
    }
    return worst;
  });
  s.add("averaged_circuit_matches_first_term", 1e-6, [&] {
    return std::abs(estimator::averaged_circuit_expectation(m, rho, gj) - exact_first);
  });
  s.add("register_outcomes_match_sampler", 1e-10, [&] {
    const estimator::ShotSampler sampler(m, rho, gj);
    const auto mod = estimator::modular_unitary(m, 0.8);
    const auto inv = estimator::inv_sqrt_encoding(m);
    const auto dense = estimator::register_outcomes(m, rho, gj, -0.3, mod, inv);
    const auto fast = sampler.outcomes(0.8, -0.3);
    double worst = 0.0;
    for (std::size_t i = 0; i < dense.prob_z0.size(); ++i) {
      worst = std::max({worst, std::abs(dense.prob_z0[i] - fast.prob_z0[i]),
                        std::abs(dense.prob_z1[i] - fast.prob_z1[i])});
    }
    return worst;
  });
  s.add("shot_estimate_within_epsilon", 0.05, [&] {
    estimator::EstimatorConfig cfg;
    cfg.epsilon = 0.05;
    cfg.delta = 0.05;
    cfg.seed = 4040;
    cfg.threads = threads;
    return std::abs(estimator::estimate_first_term(m, rho, gj, cfg).mean - exact_first);
  }, true);
  s.add("be_product_bound", 0.0, [&] {
    std::uniform_real_distribution<double> u(0.0, 0.1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double alpha = 1.0 + 3.0 * u(rng) * 10.0;
      const double beta = 1.0 + 3.0 * u(rng) * 10.0;
      const CMatrix a = 0.9 * random_unitary(3, rng);
      const CMatrix b = 0.9 * random_unitary(3, rng);
      const CMatrix ea = u(rng) * random_hermitian(3, rng);
      const CMatrix eb = u(rng) * random_hermitian(3, rng);
      const double delta = spectral_norm(ea);
      const double eps = spectral_norm(eb);
      const CMatrix ta = alpha * a + ea;  // encoded operators alpha * block
      const CMatrix tb = beta * b + eb;
      const auto meta = estimator::be_product({alpha, 1, delta}, {beta, 1, eps});
      const double dev = spectral_norm(ta * tb - alpha * beta * a * b);
      worst = std::max(worst, dev - meta.delta);
    }
    return std::max(0.0, worst);
  });
  s.add("budget_split_total", 1e-15, [] {
    double worst = 0.0;
    for (double kappa : {1.0, 2.5, 10.0})
      for (double g : {0.5, 1.0, 3.0}) {
        const auto b = estimator::budget_split(0.05, kappa, g);
        worst = std::max(worst, std::abs(estimator::error_budget(b.eps1, b.eps2, kappa, g) - 0.025) / 0.025);
      }
    return worst;
  });
  s.add("hoeffding_reference_count", 0.0, [] {
    return std::abs(static_cast<double>(estimator::hoeffding_shots(1.0, 1.0, 0.1, 0.05)) - 738.0);
  });
  s.add("query_cost_kappa_cubed", 1e-12, [] {
    using estimator::QueryKind;
    const double c1 = estimator::query_cost(QueryKind::FullAlgorithm, 4.0, 0.0, 1.0, 0.01, 0.05);
    const double c2 = estimator::query_cost(QueryKind::FullAlgorithm, 8.0, 0.0, 1.0, 0.01, 0.05);
    const double expected = 8.0 * std::log(800.0) / std::log(400.0);
    return std::abs(c2 / c1 - expected) / expected;
  });
  s.add("inv_sqrt_cost_log_scaling", 1e-12, [] {
    using estimator::QueryKind;
    const double kappa = 7.0;
    const double c1 = estimator::query_cost(QueryKind::InvSqrt, kappa, 0.0, 1.0, 1e-3, 0.05);
    const double c2 = estimator::query_cost(QueryKind::InvSqrt, kappa, 0.0, 1.0, 1e-4, 0.05);
    return std::abs(c2 - c1 - kappa * std::log(10.0)) / (kappa * std::log(10.0));
  });
  return s.take();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"matcalc", "densities", "gradients", "estimator"};
  return names;
}

bool is_suite(const std::string& name) {
  return name == "all" ||
         std::find(suite_names().begin(), suite_names().end(), name) != suite_names().end();
}

std::vector<Check> run_suite(const std::string& name, int threads) {
  if (!is_suite(name)) throw InputError("unknown suite '" + name + "'");
  std::vector<Check> out;
  const auto append = [&out](std::vector<Check> c) {
    out.insert(out.end(), c.begin(), c.end());
  };
  if (name == "matcalc" || name == "all") append(matcalc_suite());
  if (name == "densities" || name == "all") append(densities_suite());
  if (name == "gradients" || name == "all") append(gradients_suite());
  if (name == "estimator" || name == "all") append(estimator_suite(threads));
  return out;
}

nlohmann::json report_json(const std::vector<Check>& checks) {
  nlohmann::json list = nlohmann::json::array();
  std::size_t failed = 0;
  double worst = 0.0;
  for (const Check& c : checks) {
    list.push_back({{"suite", c.suite},
                    {"name", c.name},
                    {"residual", std::isfinite(c.residual) ? nlohmann::json(c.residual)
                                                           : nlohmann::json("inf")},
                    {"tolerance", c.tolerance},
                    {"passed", c.passed},
                    {"statistical", c.statistical}});
    if (!c.passed) ++failed;
    if (!c.statistical) worst = std::max(worst, c.residual);
  }
  return {{"checks", list},
          {"total", checks.size()},
          {"failed", failed},
          {"passed", failed == 0},
          {"max_residual", std::isfinite(worst) ? nlohmann::json(worst) : nlohmann::json("inf")}};
}

}  // namespace qbm::verify
