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

// qbmgrad command line driver.
//   exit 0 success, 1 check failure, 2 input error, 3 numerical guard

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "qbmgrad/errors.hpp"
#include "qbmgrad/runspec.hpp"
#include "qbmgrad/verify.hpp"

namespace fs = std::filesystem;
using qbm::RVector;
using qbm::io::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kInputError = 2, kNumericalError = 3 };

struct Options {
  std::string spec;
  std::string suite = "all";
  std::string objective;
  std::optional<double> q;
  std::string mode;
  std::optional<std::uint64_t> shots;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Options& o, bool needs_spec) {
  auto* spec = cmd->add_option("--spec", o.spec, "Run spec JSON file");
  if (needs_spec) spec->required()->check(CLI::ExistingFile);
  cmd->add_option("--objective", o.objective, "umegaki or tsallis")
      ->check(CLI::IsMember({"umegaki", "tsallis"}));
  cmd->add_option("--q", o.q, "Petz-Tsallis order");
  cmd->add_option("--mode", o.mode, "exact or shot")->check(CLI::IsMember({"exact", "shot"}));
  cmd->add_option("--shots", o.shots, "Shots per estimate; 0 selects the Hoeffding count");
  cmd->add_option("--epsilon", o.epsilon, "Target accuracy");
  cmd->add_option("--delta", o.delta, "Failure probability");
  cmd->add_option("--seed", o.seed, "RNG seed (QBMGRAD_SEED overrides)");
  cmd->add_option("--threads", o.threads, "Worker threads (default: hardware)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", o.out, "Output directory");
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("QBMGRAD_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != std::string(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw qbm::InputError("QBMGRAD_SEED must be a non-negative integer");
  }
}

int thread_count(const Options& o) {
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

qbm::io::RunSpec load(const Options& o) {
  qbm::io::RunSpec spec = qbm::io::load_runspec(o.spec);
  if (!o.objective.empty()) {
    if (o.objective == "umegaki") {
      spec.objective = qbm::grad::Objective::umegaki();
    } else if (o.objective == "tsallis") {
      if (!o.q) throw qbm::InputError("--objective tsallis needs --q");
      spec.objective = *o.q == 1.0 ? qbm::grad::Objective::umegaki()
                                   : qbm::grad::Objective::petz_tsallis(*o.q);
    } else {
      throw qbm::InputError("--objective must be umegaki or tsallis");
    }
  } else if (o.q) {
    throw qbm::InputError("--q needs --objective tsallis");
  }
  if (o.mode == "shot") spec.train.mode = qbm::train::GradientMode::Shot;
  if (o.mode == "exact") spec.train.mode = qbm::train::GradientMode::Exact;
  if (o.shots) spec.estimate.shots = *o.shots;
  if (o.epsilon) spec.estimate.epsilon = *o.epsilon;
  if (o.delta) spec.estimate.delta = *o.delta;
  if (!(spec.estimate.epsilon > 0.0)) throw qbm::InputError("--epsilon must be positive");
  if (!(spec.estimate.delta > 0.0 && spec.estimate.delta < 1.0)) {
    throw qbm::InputError("--delta must lie in (0, 1)");
  }
  if (o.seed) spec.seed = *o.seed;
  if (const auto s = env_seed()) spec.seed = *s;
  spec.estimate.seed = spec.seed;
  spec.estimate.threads = thread_count(o);
  spec.train.objective = spec.objective;
  spec.train.estimator = spec.estimate;
  return spec;
}

fs::path out_dir(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw qbm::InputError("cannot create output directory '" + o.out + "'");
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw qbm::InputError("cannot write '" + path.string() + "'");
  os << j.dump(2) << '\n';
}

int cmd_verify(const Options& o) {
  if (!qbm::verify::is_suite(o.suite)) {
    std::cerr << "qbmgrad: unknown suite '" << o.suite << "'\n";
    return kInputError;
  }
  const auto checks = qbm::verify::run_suite(o.suite, thread_count(o));
  const json report = qbm::verify::report_json(checks);
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << '/' << c.name
              << " residual=" << c.residual << " tol=" << c.tolerance << '\n';
  }
  std::cout << report["total"].get<std::size_t>() - report["failed"].get<std::size_t>() << '/'
            << report["total"].get<std::size_t>() << " checks passed\n";
  write_json(out_dir(o) / "report.json", report);
  return report["passed"].get<bool>() ? kOk : kCheckFailed;
}

int cmd_grad(const Options& o) {
  const auto spec = load(o);
  const auto& p = spec.problem;
  const RVector& theta = p.initial_theta();
  const auto report = p.gradient(theta, spec.objective);
  const RVector fd = qbm::train::finite_diff_gradient(p, theta, spec.objective);
  json j = qbm::io::gradient_report_json(spec, report, fd);
  j["objective_value"] = p.objective(theta, spec.objective);
  if (spec.train.mode == qbm::train::GradientMode::Shot) {
    j["shot_gradient"] = qbm::io::vector_to_json(p.shot_gradient(theta, spec.objective, spec.estimate));
    j["seed"] = spec.seed;
  }
  bool agree = true;
  for (Eigen::Index i = 0; i < fd.size(); ++i) {
    const double tol = 1e-6 * std::max(std::abs(fd(i)), std::abs(report.values(i))) + 1e-9;
    if (std::abs(fd(i) - report.values(i)) > tol) agree = false;
  }
  j["finite_difference_agrees"] = agree;
  write_json(out_dir(o) / "report.json", j);
  std::cout << j.dump(2) << '\n';
  return agree ? kOk : kCheckFailed;
}

int cmd_train(const Options& o) {
  const auto spec = load(o);
  const auto traj = qbm::train::train(spec.problem, spec.train);
  const fs::path dir = out_dir(o);
  {
    std::ofstream csv(dir / "trajectory.csv");
    if (!csv) throw qbm::InputError("cannot write trajectory.csv");
    qbm::io::write_trajectory_csv(traj, csv);
  }
  json j = qbm::io::trajectory_summary_json(traj);
  j["name"] = spec.name;
  j["model"] = spec.model_kind;
  j["objective"] = spec.objective.name();
  j["mode"] = spec.train.mode == qbm::train::GradientMode::Shot ? "shot" : "exact";
  j["learning_rate"] = spec.train.learning_rate;
  j["seed"] = spec.seed;
  write_json(dir / "report.json", j);
  std::cout << j.dump(2) << '\n';
  if (traj.status == qbm::train::Trajectory::Status::Diverged) {
    std::cerr << "qbmgrad: " << traj.message << '\n';
    return kNumericalError;
  }
  return kOk;
}

int cmd_estimate(const Options& o) {
  const auto spec = load(o);
  if (!spec.objective.is_umegaki()) {
    throw qbm::InputError("the circuit estimator targets the Umegaki first term");
  }
  const auto view = qbm::io::generic_view(spec.problem);
  const auto m = qbm::model::ThermalModel::thermalize(view.hamiltonian);
  const auto exact = qbm::grad::grad(m, view.target, qbm::grad::Objective::umegaki());
  json terms = json::array();
  bool all_within = true;
  const int n = view.hamiltonian.num_params();
  for (int j = 0; j < n; ++j) {
    if (spec.estimate_term >= 0 && j != spec.estimate_term) continue;
    qbm::estimator::EstimatorConfig cfg = spec.estimate;
    cfg.seed = spec.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(j);
    const auto est = qbm::estimator::estimate_first_term(m, view.target,
                                                         view.hamiltonian.terms()[j], cfg);
    const double err = std::abs(est.mean - exact.first_terms(j));
    all_within = all_within && err <= cfg.epsilon;
    terms.push_back({{"term", j},
                     {"mean", est.mean},
                     {"std_error", est.std_error},
                     {"shots", est.shots},
                     {"exact", exact.first_terms(j)},
                     {"abs_error", err},
                     {"within_epsilon", err <= cfg.epsilon},
                     {"kappa", est.kappa},
                     {"g_norm", est.g_norm}});
  }
  json j{{"name", spec.name},
         {"model", spec.model_kind},
         {"epsilon", spec.estimate.epsilon},
         {"delta", spec.estimate.delta},
         {"seed", spec.seed},
         {"threads", spec.estimate.threads},
         {"terms", terms},
         {"all_within_epsilon", all_within}};
  write_json(out_dir(o) / "report.json", j);
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytic and estimated gradients for quantum Boltzmann machines", "qbmgrad"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", o.suite, "matcalc|densities|gradients|estimator|all");
  add_common(verify, o, false);
  auto* grad = app.add_subcommand("grad", "Analytic gradient with finite-difference comparison");
  add_common(grad, o, true);
  auto* train = app.add_subcommand("train", "Gradient-descent training");
  add_common(train, o, true);
  auto* estimate = app.add_subcommand("estimate", "Shot-based first-term estimation");
  add_common(estimate, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (verify->parsed()) return cmd_verify(o);
    if (grad->parsed()) return cmd_grad(o);
    if (train->parsed()) return cmd_train(o);
    if (estimate->parsed()) return cmd_estimate(o);
  } catch (const qbm::InputError& e) {
    std::cerr << "qbmgrad: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const qbm::NumericalError& e) {
    std::cerr << "qbmgrad: numerical guard: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "qbmgrad: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kInputError;
}
