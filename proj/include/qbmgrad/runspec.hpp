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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "qbmgrad/estimator.hpp"
#include "qbmgrad/gradients.hpp"
#include "qbmgrad/trainer.hpp"

namespace qbm::io {

using nlohmann::json;

// Complex matrices are row-major nested arrays of [re, im] pairs. A string of
// Pauli letters ("ZI", "XX") is accepted wherever an operator is expected.
CMatrix matrix_from_json(const json& j);
json matrix_to_json(const CMatrix& m);
CMatrix pauli_string(const std::string& label);
RVector vector_from_json(const json& j);
json vector_to_json(const RVector& v);

// Restricted-model layout kept for reporting gradients as (a, b, w).
struct RestrictedLayout {
  int m = 0;
  int n = 0;
};

struct RunSpec {
  std::string name;
  std::string model_kind;  // generic | restricted | qc | cq | classical
  train::Problem problem;
  std::optional<RestrictedLayout> restricted;
  grad::Objective objective;
  train::TrainConfig train;
  estimator::EstimatorConfig estimate;
  int estimate_term = -1;  // -1 estimates every term
  std::uint64_t seed = 0;
};

RunSpec parse_runspec(const json& j);
RunSpec load_runspec(const std::filesystem::path& path);

// Generic view of any problem: the parameterized Hamiltonian and a target
// density matrix on the visible space.
struct GenericView {
  model::ParamHamiltonian hamiltonian;
  QuantumState target;
};
GenericView generic_view(const train::Problem& p);

std::string format_double(double x);

json gradient_report_json(const RunSpec& spec, const grad::GradientReport& report,
                          const RVector& finite_diff);
json trajectory_summary_json(const train::Trajectory& t);
void write_trajectory_csv(const train::Trajectory& t, std::ostream& os);

}  // namespace qbm::io
