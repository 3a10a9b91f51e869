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

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbmgrad/densities.hpp"
#include "qbmgrad/errors.hpp"
#include "qbmgrad/estimator.hpp"
#include "qbmgrad/gradients.hpp"
#include "qbmgrad/runspec.hpp"
#include "qbmgrad/trainer.hpp"
#include "qbmgrad/verify.hpp"

namespace py = pybind11;
using namespace qbm;

namespace {

grad::Objective objective(double q) {
  return q == 1.0 ? grad::Objective::umegaki() : grad::Objective::petz_tsallis(q);
}

model::ParamHamiltonian hamiltonian(const std::vector<CMatrix>& terms, const RVector& theta,
                                    int visible, int hidden) {
  std::vector<HermitianOperator> ops;
  ops.reserve(terms.size());
  for (const auto& t : terms) ops.emplace_back(t);
  return {{visible, hidden}, std::move(ops), theta};
}

Density density(const std::string& name, double r) {
  if (name == "tent") return Density::high_peak_tent();
  if (name == "logistic") return Density::logistic();
  if (name == "beta") return Density::beta_r(r);
  throw InputError("density must be tent, logistic or beta");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Analytic gradients for quantum Boltzmann machines";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "gradient",
      [](const std::vector<CMatrix>& terms, const RVector& theta, int visible, int hidden,
         const CMatrix& target, double q) {
        const auto h = hamiltonian(terms, theta, visible, hidden);
        const auto r = grad::grad(model::ThermalModel::thermalize(h), QuantumState(target), objective(q));
        py::dict out;
        out["values"] = r.values;
        out["first_terms"] = r.first_terms;
        out["second_terms"] = r.second_terms;
        out["q_factor"] = r.q_factor;
        return out;
      },
      py::arg("terms"), py::arg("theta"), py::arg("visible"), py::arg("hidden"), py::arg("target"),
      py::arg("q") = 1.0);

  m.def(
      "objective",
      [](const std::vector<CMatrix>& terms, const RVector& theta, int visible, int hidden,
         const CMatrix& target, double q) {
        const auto h = hamiltonian(terms, theta, visible, hidden);
        return train::Problem::generic(h, QuantumState(target)).objective(theta, objective(q));
      },
      py::arg("terms"), py::arg("theta"), py::arg("visible"), py::arg("hidden"), py::arg("target"),
      py::arg("q") = 1.0);

  m.def(
      "visible_marginal",
      [](const std::vector<CMatrix>& terms, const RVector& theta, int visible, int hidden) {
        return model::ThermalModel::thermalize(hamiltonian(terms, theta, visible, hidden)).sigma_v();
      },
      py::arg("terms"), py::arg("theta"), py::arg("visible"), py::arg("hidden"));

  m.def(
      "pdf", [](const std::string& name, double t, double r) { return pdf(density(name, r), t); },
      py::arg("density"), py::arg("t"), py::arg("r") = 0.5);
  m.def(
      "tail_mass_bound",
      [](const std::string& name, double horizon, double r) { return tail_mass_bound(density(name, r), horizon); },
      py::arg("density"), py::arg("horizon"), py::arg("r") = 0.5);
  m.def(
      "tail_mass_numeric",
      [](const std::string& name, double horizon, double r) { return tail_mass_numeric(density(name, r), horizon); },
      py::arg("density"), py::arg("horizon"), py::arg("r") = 0.5);
  m.def("verify_contour_lemma", &verify_contour_lemma, py::arg("r"), py::arg("u"));

  m.def("hoeffding_shots", &estimator::hoeffding_shots, py::arg("kappa"), py::arg("g_norm"),
        py::arg("epsilon"), py::arg("delta"));

  m.def(
      "_verify_json",
      [](const std::string& suite) {
        if (suite != "all" && !verify::is_suite(suite)) throw InputError("unknown suite '" + suite + "'");
        py::gil_scoped_release release;
        return verify::report_json(verify::run_suite(suite)).dump();
      },
      py::arg("suite") = "all");

  m.def(
      "_grad_spec_json",
      [](const std::string& path) {
        const io::RunSpec spec = io::load_runspec(path);
        const RVector theta = spec.problem.initial_theta();
        const auto report = spec.problem.gradient(theta, spec.objective);
        const RVector fd = train::finite_diff_gradient(spec.problem, theta, spec.objective);
        return io::gradient_report_json(spec, report, fd).dump();
      },
      py::arg("path"));

  m.def(
      "_train_spec",
      [](const std::string& path) {
        const io::RunSpec spec = io::load_runspec(path);
        train::Trajectory t;
        {
          py::gil_scoped_release release;
          t = train::train(spec.problem, spec.train);
        }
        std::ostringstream csv;
        io::write_trajectory_csv(t, csv);
        return py::make_tuple(io::trajectory_summary_json(t).dump(), csv.str());
      },
      py::arg("path"));
}
