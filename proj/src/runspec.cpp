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

#include "qbmgrad/runspec.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "qbmgrad/errors.hpp"

namespace qbm::io {

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + " must be an integer");
  return j.get<int>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw InputError(what + " must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<HermitianOperator> operators(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + " must be a non-empty array");
  std::vector<HermitianOperator> out;
  for (const auto& item : j) {
    const CMatrix m = matrix_from_json(item);
    if (m.rows() != dim) {
      throw InputError(what + ": operator dimension " + std::to_string(m.rows()) +
                       " does not match " + std::to_string(dim));
    }
    out.emplace_back(m);
  }
  return out;
}

RVector theta_or_zero(const json& model, int n) {
  if (!model.contains("theta")) return RVector::Zero(n);
  RVector theta = vector_from_json(model.at("theta"));
  if (theta.size() != n) {
    throw InputError("model.theta has " + std::to_string(theta.size()) + " entries, expected " +
                     std::to_string(n));
  }
  return theta;
}

CMatrix basis_or_identity(const json& model, const char* key, int dim) {
  if (!model.contains(key)) return CMatrix::Identity(dim, dim);
  const CMatrix w = matrix_from_json(model.at(key));
  if (w.rows() != dim) throw InputError(std::string("model.") + key + " has the wrong dimension");
  if ((w.adjoint() * w - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError(std::string("model.") + key + " is not unitary");
  }
  return w;
}

RVector probabilities(const json& j, int dim) {
  RVector p = vector_from_json(j);
  if (p.size() != dim) throw InputError("target.probabilities has the wrong length");
  if ((p.array() < 0.0).any()) throw InputError("target.probabilities must be non-negative");
  if (std::abs(p.sum() - 1.0) > kStateTol) throw InputError("target.probabilities must sum to 1");
  return p;
}

QuantumState target_state(const json& target, int dim) {
  if (target.contains("density_matrix")) {
    const CMatrix m = matrix_from_json(target.at("density_matrix"));
    if (m.rows() != dim) throw InputError("target.density_matrix has the wrong dimension");
    return QuantumState(m);
  }
  if (target.contains("pure")) {
    const json& v = target.at("pure");
    if (!v.is_array() || static_cast<int>(v.size()) != dim) {
      throw InputError("target.pure must list " + std::to_string(dim) + " amplitudes");
    }
    CVector psi(dim);
    for (int i = 0; i < dim; ++i) {
      const json& e = v[i];
      if (e.is_number()) {
        psi(i) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        psi(i) = Complex(number(e[0], "amplitude"), number(e[1], "amplitude"));
      } else {
        throw InputError("target.pure entries must be numbers or [re, im] pairs");
      }
    }
    if (std::abs(psi.norm() - 1.0) > kStateTol) throw InputError("target.pure must be normalized");
    return QuantumState::pure(psi);
  }
  if (target.contains("probabilities")) {
    return QuantumState::diagonal(probabilities(target.at("probabilities"), dim));
  }
  throw InputError("target needs density_matrix, pure or probabilities");
}

RVector target_probs(const json& target, int dim) {
  if (!target.contains("probabilities")) {
    throw InputError("classical-visible models need target.probabilities");
  }
  return probabilities(target.at("probabilities"), dim);
}

BipartiteDims dims_of(const json& model) {
  BipartiteDims d{integer(require(model, "visible", "model"), "model.visible"),
                  model.contains("hidden") ? integer(model.at("hidden"), "model.hidden") : 1};
  d.validate();
  return d;
}

grad::Objective parse_objective(const json& j) {
  std::string kind;
  double q = 1.0;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    kind = require(j, "kind", "objective").get<std::string>();
    if (j.contains("q")) q = number(j.at("q"), "objective.q");
  } else {
    throw InputError("objective must be a string or an object");
  }
  if (kind == "umegaki") return grad::Objective::umegaki();
  if (kind == "tsallis" || kind == "petz_tsallis") {
    if (q == 1.0) return grad::Objective::umegaki();
    return grad::Objective::petz_tsallis(q);
  }
  throw InputError("unknown objective '" + kind + "'");
}

void parse_problem(const json& model, const json& target, RunSpec& spec) {
  spec.model_kind = require(model, "kind", "model").get<std::string>();
  const std::string& kind = spec.model_kind;
  if (kind == "classical") {
    model::EnergyTable table;
    table.visible = integer(require(model, "visible", "model"), "model.visible");
    table.hidden = model.contains("hidden") ? integer(model.at("hidden"), "model.hidden") : 1;
    const json& energies = require(model, "energies", "model");
    if (!energies.is_array() || energies.empty()) {
      throw InputError("model.energies must be a non-empty array");
    }
    for (const auto& e : energies) {
      if (!e.is_array() || static_cast<int>(e.size()) != table.visible) {
        throw InputError("each energy table needs one row per visible configuration");
      }
      RMatrix t(table.visible, table.hidden);
      for (int v = 0; v < table.visible; ++v) {
        const RVector row = vector_from_json(e[v]);
        if (row.size() != table.hidden) throw InputError("energy row has the wrong length");
        t.row(v) = row.transpose();
      }
      table.terms.push_back(t);
    }
    table.validate();
    const RVector theta = theta_or_zero(model, table.num_params());
    spec.problem = train::Problem::classical(table, theta, target_probs(target, table.visible));
    return;
  }

  const BipartiteDims dims = dims_of(model);
  if (kind == "restricted") {
    model::RestrictedSpec rs;
    rs.visible_ops = operators(require(model, "visible_ops", "model"), dims.visible,
                               "model.visible_ops");
    rs.hidden_ops = operators(require(model, "hidden_ops", "model"), dims.hidden,
                              "model.hidden_ops");
    rs.a = model.contains("a") ? vector_from_json(model.at("a")) : RVector::Zero(rs.m());
    rs.b = model.contains("b") ? vector_from_json(model.at("b")) : RVector::Zero(rs.n());
    rs.w = RMatrix::Zero(rs.m(), rs.n());
    if (model.contains("w")) {
      const json& w = model.at("w");
      if (!w.is_array() || static_cast<int>(w.size()) != rs.m()) {
        throw InputError("model.w must have one row per visible operator");
      }
      for (int i = 0; i < rs.m(); ++i) {
        const RVector row = vector_from_json(w[i]);
        if (row.size() != rs.n()) throw InputError("model.w row has the wrong length");
        rs.w.row(i) = row.transpose();
      }
    }
    rs.validate();
    spec.restricted = RestrictedLayout{rs.m(), rs.n()};
    const model::ParamHamiltonian h = model::restricted_to_param(rs);
    const std::string structure = model.value("structure", std::string("quantum"));
    if (structure == "quantum") {
      spec.problem = train::Problem::generic(h, target_state(target, dims.visible));
    } else if (structure == "qc") {
      spec.problem = train::Problem::qc(h, basis_or_identity(model, "basis", dims.hidden),
                                        target_state(target, dims.visible));
    } else if (structure == "cq") {
      spec.problem = train::Problem::cq(h, basis_or_identity(model, "basis", dims.visible),
                                        target_probs(target, dims.visible));
    } else {
      throw InputError("model.structure must be quantum, qc or cq");
    }
    return;
  }

  const auto terms = operators(require(model, "terms", "model"), dims.total(), "model.terms");
  const RVector theta = theta_or_zero(model, static_cast<int>(terms.size()));
  const model::ParamHamiltonian h(dims, terms, theta);
  if (kind == "generic") {
    spec.problem = train::Problem::generic(h, target_state(target, dims.visible));
  } else if (kind == "qc") {
    spec.problem = train::Problem::qc(h, basis_or_identity(model, "hidden_basis", dims.hidden),
                                      target_state(target, dims.visible));
  } else if (kind == "cq") {
    spec.problem = train::Problem::cq(h, basis_or_identity(model, "visible_basis", dims.visible),
                                      target_probs(target, dims.visible));
  } else {
    throw InputError("unknown model kind '" + kind + "'");
  }
}

}  // namespace

CMatrix pauli_string(const std::string& label) {
  if (label.empty()) throw InputError("empty Pauli label");
  CMatrix out = CMatrix::Identity(1, 1);
  for (char c : label) {
    CMatrix p(2, 2);
    switch (c) {
      case 'I':
        p << 1, 0, 0, 1;
        break;
      case 'X':
        p << 0, 1, 1, 0;
        break;
      case 'Y':
        p << 0, Complex(0, -1), Complex(0, 1), 0;
        break;
      case 'Z':
        p << 1, 0, 0, -1;
        break;
      default:
        throw InputError("invalid Pauli label '" + label + "'");
    }
    out = kron(out, p);
  }
  if (out.rows() > kMaxDim) throw InputError("Pauli label exceeds the dimension limit");
  return out;
}

CMatrix matrix_from_json(const json& j) {
  if (j.is_string()) return pauli_string(j.get<std::string>());
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const int n = static_cast<int>(j.size());
  if (n > kMaxDim) throw InputError("matrix exceeds the dimension limit");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw InputError("matrix must be square");
    }
    for (int c = 0; c < n; ++c) {
      const json& e = row[c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = Complex(number(e[0], "matrix entry"), number(e[1], "matrix entry"));
      } else {
        throw InputError("matrix entries must be [re, im] pairs");
      }
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) {
        throw InputError("matrix entries must be finite");
      }
    }
  }
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    out.push_back(row);
  }
  return out;
}

RVector vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  RVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number(j[i], "array entry");
    if (!std::isfinite(v(static_cast<Eigen::Index>(i)))) throw InputError("array entries must be finite");
  }
  return v;
}

json vector_to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RunSpec parse_runspec(const json& j) {
  if (!j.is_object()) throw InputError("spec must be a JSON object");
  RunSpec spec;
  spec.name = j.value("name", std::string());
  parse_problem(require(j, "model", "spec"), require(j, "target", "spec"), spec);
  if (j.contains("objective")) spec.objective = parse_objective(j.at("objective"));
  if (j.contains("seed")) spec.seed = unsigned_integer(j.at("seed"), "seed");

  if (j.contains("train")) {
    const json& t = j.at("train");
    if (t.contains("learning_rate")) spec.train.learning_rate = number(t.at("learning_rate"), "train.learning_rate");
    if (t.contains("iterations")) spec.train.iterations = integer(t.at("iterations"), "train.iterations");
    if (t.contains("max_halvings")) spec.train.max_halvings = integer(t.at("max_halvings"), "train.max_halvings");
    if (t.contains("log_every")) spec.train.log_every = integer(t.at("log_every"), "train.log_every");
    if (t.contains("grad_tolerance")) spec.train.grad_tolerance = number(t.at("grad_tolerance"), "train.grad_tolerance");
    if (t.contains("mode")) {
      const std::string mode = t.at("mode").get<std::string>();
      if (mode == "exact") {
        spec.train.mode = train::GradientMode::Exact;
      } else if (mode == "shot") {
        spec.train.mode = train::GradientMode::Shot;
      } else {
        throw InputError("train.mode must be exact or shot");
      }
    }
  }
  if (!(spec.train.learning_rate > 0.0)) throw InputError("train.learning_rate must be positive");
  if (spec.train.iterations < 0) throw InputError("train.iterations must be non-negative");
  if (spec.train.log_every < 1) throw InputError("train.log_every must be at least 1");

  if (j.contains("estimate")) {
    const json& e = j.at("estimate");
    if (e.contains("epsilon")) spec.estimate.epsilon = number(e.at("epsilon"), "estimate.epsilon");
    if (e.contains("delta")) spec.estimate.delta = number(e.at("delta"), "estimate.delta");
    if (e.contains("shots")) spec.estimate.shots = unsigned_integer(e.at("shots"), "estimate.shots");
    if (e.contains("term")) spec.estimate_term = integer(e.at("term"), "estimate.term");
  }
  if (!(spec.estimate.epsilon > 0.0)) throw InputError("estimate.epsilon must be positive");
  if (!(spec.estimate.delta > 0.0 && spec.estimate.delta < 1.0)) {
    throw InputError("estimate.delta must lie in (0, 1)");
  }
  if (spec.estimate_term >= spec.problem.num_params()) {
    throw InputError("estimate.term is out of range");
  }
  spec.estimate.seed = spec.seed;
  spec.train.objective = spec.objective;
  spec.train.estimator = spec.estimate;
  return spec;
}

RunSpec load_runspec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spec file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("spec file is not valid JSON: " + std::string(e.what()));
  }
  try {
    RunSpec spec = parse_runspec(j);
    if (spec.name.empty()) spec.name = path.stem().string();
    return spec;
  } catch (const json::exception& e) {
    throw InputError("spec schema violation: " + std::string(e.what()));
  }
}

GenericView generic_view(const train::Problem& p) {
  switch (p.kind()) {
    case train::Problem::Kind::Generic:
    case train::Problem::Kind::QC:
      return {p.hamiltonian(), p.target_state()};
    case train::Problem::Kind::CQ: {
      const CMatrix& w = p.basis();
      const CMatrix rho = w * p.target_probs().cast<Complex>().asDiagonal() * w.adjoint();
      return {p.hamiltonian(), QuantumState(HermitianOperator::from_computed(rho))};
    }
    case train::Problem::Kind::Classical:
      return {model::classical_to_param(p.table(), p.initial_theta()),
              QuantumState::diagonal(p.target_probs())};
  }
  throw InputError("unsupported problem kind");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json gradient_report_json(const RunSpec& spec, const grad::GradientReport& report,
                          const RVector& finite_diff) {
  json out;
  out["name"] = spec.name;
  out["model"] = spec.model_kind;
  out["objective"] = spec.objective.name();
  out["q"] = spec.objective.q;
  out["q_factor"] = report.q_factor;
  out["gradient"] = vector_to_json(report.values);
  out["first_terms"] = vector_to_json(report.first_terms);
  out["second_terms"] = vector_to_json(report.second_terms);
  out["finite_difference"] = vector_to_json(finite_diff);
  const RVector residual = (report.values - finite_diff).cwiseAbs();
  out["finite_difference_residual"] = vector_to_json(residual);
  out["max_residual"] = residual.size() ? residual.maxCoeff() : 0.0;
  if (spec.restricted) {
    const auto g = model::unpack_restricted(report.values, spec.restricted->m, spec.restricted->n);
    json w = json::array();
    for (Eigen::Index i = 0; i < g.w.rows(); ++i) w.push_back(vector_to_json(g.w.row(i).transpose()));
    out["restricted"] = {{"a", vector_to_json(g.a)}, {"b", vector_to_json(g.b)}, {"w", w}};
  }
  return out;
}

json trajectory_summary_json(const train::Trajectory& t) {
  json out;
  out["status"] = t.status_name();
  if (!t.message.empty()) out["message"] = t.message;
  out["iterations"] = t.rows.empty() ? 0 : t.last().iter;
  if (!t.rows.empty()) {
    out["initial_objective"] = t.rows.front().objective;
    out["final_objective"] = t.last().objective;
    out["final_grad_norm"] = t.last().grad_norm;
    out["final_theta"] = vector_to_json(t.last().theta);
    out["wall_ms"] = t.last().wall_ms;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (t.rows[i].objective > t.rows[i - 1].objective) monotone = false;
  }
  out["monotone"] = monotone;
  return out;
}

void write_trajectory_csv(const train::Trajectory& t, std::ostream& os) {
  const Eigen::Index n = t.rows.empty() ? 0 : t.rows.front().theta.size();
  os << "iter,objective,grad_norm";
  for (Eigen::Index j = 0; j < n; ++j) os << ",theta_" << j;
  os << ",wall_ms\n";
  for (const auto& row : t.rows) {
    os << row.iter << ',' << format_double(row.objective) << ',' << format_double(row.grad_norm);
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(row.theta(j));
    os << ',' << format_double(row.wall_ms) << '\n';
  }
}

}  // namespace qbm::io
