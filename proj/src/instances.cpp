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

#include "qbmgrad/instances.hpp"

namespace qbm::instances {

namespace {

RVector random_theta(int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  RVector theta(n);
  for (int j = 0; j < n; ++j) theta(j) = normal(rng);
  return theta;
}

CMatrix projector(const CMatrix& basis, int x) {
  return basis.col(x) * basis.col(x).adjoint();
}

}  // namespace

model::ParamHamiltonian random_generic(BipartiteDims dims, int num_terms, std::mt19937_64& rng,
                                       double scale) {
  std::vector<HermitianOperator> terms;
  for (int j = 0; j < num_terms; ++j) {
    terms.push_back(HermitianOperator::from_computed(random_hermitian(dims.total(), rng)));
  }
  return {dims, terms, random_theta(num_terms, rng, scale)};
}

Structured random_qc(BipartiteDims dims, int num_terms, std::mt19937_64& rng, double scale) {
  const CMatrix w = random_unitary(dims.hidden, rng);
  std::vector<HermitianOperator> terms;
  for (int j = 0; j < num_terms; ++j) {
    CMatrix g = CMatrix::Zero(dims.total(), dims.total());
    for (int x = 0; x < dims.hidden; ++x) {
      g += kron(random_hermitian(dims.visible, rng), projector(w, x));
    }
    terms.push_back(HermitianOperator::from_computed(g));
  }
  return {{dims, terms, random_theta(num_terms, rng, scale)}, w};
}

Structured random_cq(BipartiteDims dims, int num_terms, std::mt19937_64& rng, double scale) {
  const CMatrix w = random_unitary(dims.visible, rng);
  std::vector<HermitianOperator> terms;
  for (int j = 0; j < num_terms; ++j) {
    CMatrix g = CMatrix::Zero(dims.total(), dims.total());
    for (int x = 0; x < dims.visible; ++x) {
      g += kron(projector(w, x), random_hermitian(dims.hidden, rng));
    }
    terms.push_back(HermitianOperator::from_computed(g));
  }
  return {{dims, terms, random_theta(num_terms, rng, scale)}, w};
}

model::EnergyTable random_table(int visible, int hidden, int num_terms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  model::EnergyTable table;
  table.visible = visible;
  table.hidden = hidden;
  for (int j = 0; j < num_terms; ++j) {
    RMatrix t(visible, hidden);
    for (int v = 0; v < visible; ++v)
      for (int h = 0; h < hidden; ++h) t(v, h) = u(rng);
    table.terms.push_back(t);
  }
  return table;
}

RVector random_probabilities(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  RVector p(n);
  for (int i = 0; i < n; ++i) p(i) = e(rng);
  return p / p.sum();
}

}  // namespace qbm::instances
