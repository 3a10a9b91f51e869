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

// Acceptance checks. Run with a criterion number (1-11) or with no argument
// for all of them; prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qbmgrad/densities.hpp"
#include "qbmgrad/estimator.hpp"
#include "qbmgrad/gradients.hpp"
#include "qbmgrad/instances.hpp"
#include "qbmgrad/matcalc.hpp"
#include "qbmgrad/runspec.hpp"
#include "qbmgrad/trainer.hpp"

using namespace qbm;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Worst ratio |a - b| / (rel * max(|a|, |b|) + abs); <= 1 passes.
double tolerance_ratio(const RVector& a, const RVector& b, double rel, double abs) {
  double worst = 0.0;
  for (int j = 0; j < a.size(); ++j) {
    const double scale = std::max(std::abs(a(j)), std::abs(b(j)));
    worst = std::max(worst, std::abs(a(j) - b(j)) / (rel * scale + abs));
  }
  return worst;
}

grad::Objective objective_for(double q) {
  return q == 1.0 ? grad::Objective::umegaki() : grad::Objective::petz_tsallis(q);
}

Outcome c1_gradient_fd() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::mt19937_64 rng(1000 + i);
    const auto h = instances::random_generic({4, 2}, 5, rng);
    const auto p = train::Problem::generic(h, random_state(4, rng));
    const RVector a = p.gradient(h.theta(), grad::Objective::umegaki()).values;
    const RVector fd = train::finite_diff_gradient(p, h.theta(), grad::Objective::umegaki(), 1e-5);
    worst = std::max(worst, tolerance_ratio(a, fd, 1e-6, 1e-9));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1.0 && elapsed < 60.0,
          "20 instances (4x2), worst residual/tolerance " + fmt("%.3g", worst) + ", " +
              fmt("%.2f", elapsed) + " s"};
}

Outcome c2_structured() {
  double worst_qc = 0.0;
  double worst_cq = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::mt19937_64 rng(2000 + i);
    const BipartiteDims dims{2 + i % 3, 2 + i % 2};
    const auto qc = instances::random_qc(dims, 4, rng);
    const QuantumState rho = random_state(dims.visible, rng);
    const auto a = grad::grad_qc(model::qc_decompose(qc.hamiltonian, qc.basis), rho, grad::Objective::umegaki());
    const auto b = grad::grad(model::ThermalModel::thermalize(qc.hamiltonian), rho, grad::Objective::umegaki());
    worst_qc = std::max(worst_qc, (a.values - b.values).cwiseAbs().maxCoeff());

    const auto cq = instances::random_cq(dims, 4, rng);
    const RVector r = instances::random_probabilities(dims.visible, rng);
    const QuantumState rho_cq(HermitianOperator::from_computed(
        cq.basis * r.cast<Complex>().asDiagonal() * cq.basis.adjoint()));
    const auto c = grad::grad_cq(model::cq_decompose(cq.hamiltonian, cq.basis), r, grad::Objective::umegaki());
    const auto d = grad::grad(model::ThermalModel::thermalize(cq.hamiltonian), rho_cq, grad::Objective::umegaki());
    worst_cq = std::max(worst_cq, (c.values - d.values).cwiseAbs().maxCoeff());
  }
  return {worst_qc <= 1e-8 && worst_cq <= 1e-8,
          "max |qc - generic| " + fmt("%.3g", worst_qc) + ", max |cq - generic| " + fmt("%.3g", worst_cq)};
}

Outcome c3_no_hidden() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::mt19937_64 rng(3000 + i);
    const auto h = instances::random_generic({2 + i % 4, 1}, 4, rng);
    const QuantumState rho = random_state(h.dims().visible, rng);
    const auto r = grad::grad(model::ThermalModel::thermalize(h), rho, grad::Objective::umegaki());
    for (int j = 0; j < h.num_params(); ++j)
      worst = std::max(worst, std::abs(r.first_terms(j) - expectation(h.terms()[j], rho)));
  }
  return {worst <= 1e-8, "max |first term - <G_j>_rho| " + fmt("%.3g", worst)};
}

Outcome c4_classical() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::mt19937_64 rng(4000 + i);
    const int dv = 2 + i % 3;
    const int dh = 2 + i % 2;
    const auto table = instances::random_table(dv, dh, 4, rng);
    const RVector theta = RVector::NullaryExpr(4, [&] { return std::normal_distribution<double>(0.0, 0.6)(rng); });
    const RVector r = instances::random_probabilities(dv, rng);
    // Enumeration: sum_v r_v E[E_j | v] - E[E_j] under the model joint.
    RMatrix p(dv, dh);
    for (int v = 0; v < dv; ++v)
      for (int h = 0; h < dh; ++h) {
        double e = 0.0;
        for (int j = 0; j < 4; ++j) e += theta(j) * table.terms[j](v, h);
        p(v, h) = std::exp(-e);
      }
    p /= p.sum();
    RVector expected = RVector::Zero(4);
    for (int j = 0; j < 4; ++j)
      for (int v = 0; v < dv; ++v) {
        const double pv = p.row(v).sum();
        for (int h = 0; h < dh; ++h)
          expected(j) += (r(v) * p(v, h) / pv - p(v, h)) * table.terms[j](v, h);
      }
    const auto diag = grad::grad(model::ThermalModel::thermalize(model::classical_to_param(table, theta)),
                                 QuantumState::diagonal(r), grad::Objective::umegaki());
    worst = std::max(worst, (diag.values - expected).cwiseAbs().maxCoeff());
    worst = std::max(worst, (grad::classical_gradient(table, theta, r) - expected).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, "max deviation from enumeration " + fmt("%.3g", worst)};
}

Outcome c5_tsallis() {
  double worst = 0.0;
  double continuity = 0.0;
  for (int i = 0; i < 5; ++i) {
    std::mt19937_64 rng(5000 + i);
    const auto h = instances::random_generic({4, 2}, 4, rng);
    const auto p = train::Problem::generic(h, random_state(4, rng));
    for (double q : {0.5, 1.5, 2.0}) {
      const RVector a = p.gradient(h.theta(), objective_for(q)).values;
      const RVector fd = train::finite_diff_gradient(p, h.theta(), objective_for(q), 1e-5);
      worst = std::max(worst, tolerance_ratio(a, fd, 1e-6, 1e-9));
    }
    const RVector u = p.gradient(h.theta(), grad::Objective::umegaki()).values;
    for (double q : {1.0 - 1e-4, 1.0 + 1e-4})
      continuity = std::max(continuity, (p.gradient(h.theta(), objective_for(q)).values - u).cwiseAbs().maxCoeff());
  }
  return {worst <= 1.0 && continuity < 1e-3,
          "worst FD residual/tolerance " + fmt("%.3g", worst) + ", q=1+-1e-4 deviation " + fmt("%.3g", continuity)};
}

Outcome c6_tail_bounds() {
  const double tent = tail_mass_bound(Density::high_peak_tent(), 10.0);
  const double logistic = tail_mass_bound(Density::logistic(), 10.0);
  const double tent_dev = std::abs(tent - 3.9e-14) / 3.9e-14;
  const double logistic_dev = std::abs(logistic - 4.5e-14) / 4.5e-14;
  const double tent_num = tail_mass_numeric(Density::high_peak_tent(), 10.0);
  const double logistic_num = tail_mass_numeric(Density::logistic(), 10.0);
  const bool dominated = tent_num <= tent && logistic_num <= logistic;
  return {tent_dev <= 0.03 && logistic_dev <= 0.03 && dominated,
          "tent bound " + fmt("%.4g", tent) + " (" + fmt("%.1f", 100 * tent_dev) + "% from 3.9e-14), logistic bound " +
              fmt("%.4g", logistic) + " (" + fmt("%.1f", 100 * logistic_dev) + "% from 4.5e-14), numeric tails " +
              fmt("%.3g", tent_num) + " / " + fmt("%.3g", logistic_num)};
}

Outcome c7_contour() {
  double worst = 0.0;
  for (double r : {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 0.9})
    for (double u : {0.0, 0.5, 1.0, 2.0, 5.0}) worst = std::max(worst, verify_contour_lemma(r, u));
  return {worst < 1e-8, "max contour residual " + fmt("%.3g", worst)};
}

Outcome c8_dual_paths() {
  double channel = 0.0;
  double frechet = 0.0;
  const auto q = matcalc::EvalMode::quadrature();
  for (int i = 0; i < 10; ++i) {
    std::mt19937_64 rng(8000 + i);
    const int d = 2 + i % 5;
    const CMatrix y = random_hermitian(d, rng);
    const auto g = eigh(HermitianOperator::from_computed(random_hermitian(d, rng, 3.0)));
    const auto a = eigh(random_state(d, rng).op() + HermitianOperator::identity(d) * 0.02);
    const auto diff = [&](const matcalc::ChannelKind& k, const SpectralDecomposition& s) {
      return (matcalc::apply_channel(k, s, y) - matcalc::apply_channel(k, s, y, q)).cwiseAbs().maxCoeff();
    };
    channel = std::max({channel, diff(matcalc::ChannelKind::exp_tent(), g),
                        diff(matcalc::ChannelKind::log_logistic(), a),
                        diff(matcalc::ChannelKind::power_beta(0.5), a),
                        diff(matcalc::ChannelKind::power_beta(-0.5), a)});
    const HermitianOperator b = HermitianOperator::from_computed(random_hermitian(d, rng, 3.0));
    const HermitianOperator h = HermitianOperator::from_computed(random_hermitian(d, rng));
    frechet = std::max(frechet, (matcalc::frechet_exp(b, h, matcalc::ExpPath::Duhamel).matrix() -
                                 matcalc::frechet_exp(b, h, matcalc::ExpPath::Fourier).matrix())
                                    .cwiseAbs()
                                    .maxCoeff());
  }
  return {channel <= 1e-8 && frechet <= 1e-8,
          "spectral vs quadrature " + fmt("%.3g", channel) + ", Duhamel vs Fourier " + fmt("%.3g", frechet)};
}

Outcome c9_estimator() {
  const auto t0 = std::chrono::steady_clock::now();
  double averaged = 0.0;
  for (int i = 0; i < 5; ++i) {
    std::mt19937_64 rng(9000 + i);
    const auto h = instances::random_generic({2 + i % 3, 2}, 3, rng);
    const auto m = model::ThermalModel::thermalize(h);
    const QuantumState rho = random_state(h.dims().visible, rng);
    const auto exact = grad::grad(m, rho, grad::Objective::umegaki());
    for (int j = 0; j < h.num_params(); ++j)
      averaged = std::max(averaged, std::abs(estimator::averaged_circuit_expectation(m, rho, h.terms()[j]) -
                                             exact.first_terms(j)));
  }

  const io::RunSpec spec = io::load_runspec(std::filesystem::path(QBMGRAD_DEMO_DIR) / "estimate_2v1h.json");
  const io::GenericView view = io::generic_view(spec.problem);
  const auto m = model::ThermalModel::thermalize(view.hamiltonian);
  const auto exact = grad::grad(m, view.target, grad::Objective::umegaki());
  const int term = std::max(0, spec.estimate_term);
  const estimator::ShotSampler sampler(m, view.target, view.hamiltonian.terms()[term]);
  estimator::EstimatorConfig cfg;
  cfg.epsilon = 0.05;
  cfg.delta = 0.05;
  cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int hits = 0;
  std::uint64_t shots = 0;
  for (int run = 0; run < 50; ++run) {
    cfg.seed = spec.seed + 7919ULL * static_cast<std::uint64_t>(run);
    const auto est = estimator::estimate_first_term(sampler, cfg);
    shots = est.shots;
    if (std::abs(est.mean - exact.first_terms(term)) <= cfg.epsilon) ++hits;
  }
  const double elapsed = seconds_since(t0);
  return {averaged <= 1e-6 && hits >= 47 && elapsed < 300.0,
          "averaged circuit max error " + fmt("%.3g", averaged) + ", shot runs within eps " + std::to_string(hits) +
              "/50 (" + std::to_string(shots) + " shots, kappa " + fmt("%.3g", m.kappa()) + "), " +
              fmt("%.1f", elapsed) + " s"};
}

CMatrix unitary_exp(const HermitianOperator& h, double scale) {
  return matrix_function_complex(eigh(h), [scale](double l) { return std::exp(Complex(0.0, scale * l)); });
}

// Embeds a one-ancilla unitary acting on (ancilla, system) into
// (ancilla_b, ancilla_a, system); `outer` selects which ancilla it uses.
CMatrix embed(const CMatrix& u, int d, bool outer) {
  CMatrix out = CMatrix::Zero(4 * d, 4 * d);
  for (int o = 0; o < 2; ++o)
    for (int i = 0; i < 2; ++i) {
      const CMatrix blk = u.block(o * d, i * d, d, d);
      for (int k = 0; k < 2; ++k) {
        if (outer) {
          out.block((2 * o + k) * d, (2 * i + k) * d, d, d) = blk;
        } else {
          out.block((2 * k + o) * d, (2 * k + i) * d, d, d) = blk;
        }
      }
    }
  return out;
}

Outcome c10_block_encodings() {
  std::mt19937_64 rng(10000);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_ratio = 0.0;
  double unitarity = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 3;
    const double alpha = 1.0 + 3.0 * unif(rng);
    const double beta = 1.0 + 3.0 * unif(rng);
    const double eps = 0.2 * unif(rng);
    const double del = 0.2 * unif(rng);
    // Targets with norm alpha - eps and beta - del, perturbed by exactly eps and del.
    CMatrix a = random_hermitian(d, rng) + Complex(0, 1) * random_hermitian(d, rng);
    a *= (alpha - eps) / spectral_norm(a);
    CMatrix b = random_hermitian(d, rng) + Complex(0, 1) * random_hermitian(d, rng);
    b *= (beta - del) / spectral_norm(b);
    CMatrix ea = random_hermitian(d, rng) + Complex(0, 1) * random_hermitian(d, rng);
    ea *= eps / spectral_norm(ea);
    CMatrix eb = random_hermitian(d, rng) + Complex(0, 1) * random_hermitian(d, rng);
    eb *= del / spectral_norm(eb);
    const auto ua = estimator::dilate((a + ea) / alpha, alpha);
    const auto ub = estimator::dilate((b + eb) / beta, beta);
    const CMatrix u = embed(ua.unitary, d, false) * embed(ub.unitary, d, true);
    unitarity = std::max(unitarity, (u.adjoint() * u - CMatrix::Identity(4 * d, 4 * d)).cwiseAbs().maxCoeff());
    const auto meta = estimator::be_product({alpha, 1, eps}, {beta, 1, del});
    const double deviation = spectral_norm(a * b - meta.alpha * u.topLeftCorner(d, d));
    worst_ratio = std::max(worst_ratio, deviation / meta.delta);
  }

  // Bias of the averaged first term when both encodings carry the budgeted error.
  double worst_bias = 0.0;
  const double epsilon = 0.05;
  for (int trial = 0; trial < 10; ++trial) {
    std::mt19937_64 irng(10100 + trial);
    const auto h = instances::random_generic({2, 2}, 2, irng);
    const auto m = model::ThermalModel::thermalize(h);
    const QuantumState rho = random_state(2, irng);
    const HermitianOperator& gj = h.terms()[0];
    const double g = norms(gj).spectral;
    const auto split = estimator::budget_split(epsilon, m.kappa(), g);
    const HermitianOperator drift = HermitianOperator::from_computed(random_hermitian(2, irng, 1.0));
    const auto modular = [&](double s) {
      const CMatrix exact = estimator::modular_unitary(m, s).block(0, 0);
      return estimator::dilate(exact * unitary_exp(drift, split.eps1), 1.0);
    };
    const auto exact_inv = estimator::inv_sqrt_encoding(m);
    const QuantumState r_state = random_state(2, irng);
    const CMatrix damp = CMatrix::Identity(2, 2) - (split.eps2 / exact_inv.alpha) * r_state.matrix();
    const auto inv = estimator::dilate(exact_inv.block(0, 0) * damp, exact_inv.alpha);
    const double biased = estimator::averaged_circuit_expectation(m, rho, gj, modular, inv);
    const double truth = grad::grad(m, rho, grad::Objective::umegaki()).first_terms(0);
    worst_bias = std::max(worst_bias, std::abs(biased - truth));
  }
  return {worst_ratio <= 1.0 + 1e-9 && unitarity < 1e-10 && worst_bias <= epsilon / 2,
          "100 composed encodings, worst deviation/bound " + fmt("%.3g", worst_ratio) + "; budgeted bias " +
              fmt("%.3g", worst_bias) + " (limit " + fmt("%.3g", epsilon / 2) + ")"};
}

Outcome c11_training() {
  const std::filesystem::path demos(QBMGRAD_DEMO_DIR);
  const io::RunSpec bench = io::load_runspec(demos / "benchmark_1qubit.json");
  const auto traj = train::train(bench.problem, bench.train);
  const RVector r = bench.problem.target_probs().size() ? bench.problem.target_probs()
                                                        : RVector(eigh(bench.problem.target_state().op()).values.reverse());
  const double theta_star = 0.5 * std::log(r(1) / r(0));
  const double d_final = traj.last().objective;
  const double theta_err = std::abs(traj.last().theta(0) - theta_star);
  bool ok = d_final < 1e-8 && theta_err <= 1e-4;

  std::vector<std::string> broken;
  int count = 0;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(demos))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const io::RunSpec spec = io::load_runspec(f);
    const auto t = train::train(spec.problem, spec.train);
    ++count;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      if (t.rows[i].objective > t.rows[i - 1].objective) {
        broken.push_back(spec.name);
        break;
      }
    }
  }
  ok = ok && broken.empty();
  std::string detail = "benchmark D " + fmt("%.3g", d_final) + ", |theta - theta*| " + fmt("%.3g", theta_err) +
                       "; monotone on " + std::to_string(count - static_cast<int>(broken.size())) + "/" +
                       std::to_string(count) + " demos";
  for (const auto& b : broken) detail += " [not monotone: " + b + "]";
  return {ok, detail};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list = {
      {"gradient vs finite differences", c1_gradient_fd},
      {"qc/cq vs generic gradient", c2_structured},
      {"no hidden units", c3_no_hidden},
      {"classical reduction", c4_classical},
      {"Petz-Tsallis gradients", c5_tsallis},
      {"tail bounds at T=10", c6_tail_bounds},
      {"contour lemma", c7_contour},
      {"channel dual paths", c8_dual_paths},
      {"estimator soundness", c9_estimator},
      {"block-encoding errors and budget", c10_block_encodings},
      {"training", c11_training},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > static_cast<int>(criteria().size())) {
      std::fprintf(stderr, "usage: %s [criterion 1-%zu]\n", argv[0], criteria().size());
      return 2;
    }
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome out;
    try {
      out = criteria()[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s C%zu %s: %s\n", out.passed ? "PASS" : "FAIL", i + 1, criteria()[i].first.c_str(),
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
