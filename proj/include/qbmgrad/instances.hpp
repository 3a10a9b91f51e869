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

#include <random>

#include "qbmgrad/model.hpp"

namespace qbm::instances {

// Random seeded problem instances for verification, tests and demos.

// Dense random Hermitian terms of unit spectral norm and N(0, scale^2) theta.
model::ParamHamiltonian random_generic(BipartiteDims dims, int num_terms, std::mt19937_64& rng,
                                       double scale = 0.7);

// Terms block diagonal in a random hidden basis: sum_x A_x (x) |w_x><w_x|.
struct Structured {
  model::ParamHamiltonian hamiltonian;
  CMatrix basis;
};
Structured random_qc(BipartiteDims dims, int num_terms, std::mt19937_64& rng, double scale = 0.7);
// Terms block diagonal in a random visible basis: sum_x |w_x><w_x| (x) B_x.
Structured random_cq(BipartiteDims dims, int num_terms, std::mt19937_64& rng, double scale = 0.7);

// Random energy table with entries in [-1, 1].
model::EnergyTable random_table(int visible, int hidden, int num_terms, std::mt19937_64& rng);

RVector random_probabilities(int n, std::mt19937_64& rng);

}  // namespace qbm::instances
