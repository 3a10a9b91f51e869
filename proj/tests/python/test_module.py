# Copyright 2026 The qbmgrad Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the Python extension module."""

import math
import os
import pathlib

import numpy as np
import pytest

qbmgrad = pytest.importorskip("qbmgrad")
scipy_linalg = pytest.importorskip("scipy.linalg")

DEMOS = pathlib.Path(os.environ.get("QBMGRAD_DEMOS", pathlib.Path(__file__).parents[2] / "demos"))

Z = np.diag([1.0, -1.0]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def random_state(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def reference_objective(terms, theta, dv, dh, rho):
    g = sum(t * m for t, m in zip(theta, terms))
    s = scipy_linalg.expm(-g)
    s /= np.trace(s).real
    sv = np.einsum("ahbh->ab", s.reshape(dv, dh, dv, dh))
    return np.trace(rho @ (scipy_linalg.logm(rho) - scipy_linalg.logm(sv))).real


def test_single_qubit_gradient():
    rho = np.diag([1.0, 0.0]).astype(complex)
    out = qbmgrad.gradient([Z], np.zeros(1), 2, 1, rho)
    assert out["values"][0] == pytest.approx(1.0, abs=1e-14)


def test_gradient_against_scipy():
    rng = np.random.default_rng(3)
    dv, dh = 2, 2
    terms = [random_hermitian(rng, dv * dh) for _ in range(3)]
    theta = rng.normal(scale=0.5, size=3)
    rho = random_state(rng, dv)
    out = qbmgrad.gradient(terms, theta, dv, dh, rho)
    h = 1e-5
    for j in range(3):
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        fd = (reference_objective(terms, tp, dv, dh, rho) - reference_objective(terms, tm, dv, dh, rho)) / (2 * h)
        assert out["values"][j] == pytest.approx(fd, abs=1e-7)
    assert qbmgrad.objective(terms, theta, dv, dh, rho) == pytest.approx(
        reference_objective(terms, theta, dv, dh, rho), abs=1e-10)


def test_visible_marginal_is_a_state():
    sv = qbmgrad.visible_marginal([np.kron(Z, X)], np.array([0.4]), 2, 2)
    assert np.trace(sv).real == pytest.approx(1.0)
    assert np.allclose(sv, np.eye(2) / 2)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        qbmgrad.gradient([Z], np.zeros(2), 2, 1, np.eye(2) / 2)
    with pytest.raises(ArithmeticError):
        qbmgrad.gradient([Z], np.array([800.0]), 2, 1, np.eye(2) / 2)
    with pytest.raises(ValueError):
        qbmgrad.verify("nonsense")


def test_densities():
    assert qbmgrad.pdf("logistic", 0.0) == pytest.approx(math.pi / 4)
    assert qbmgrad.tail_mass_bound("logistic", 10.0) == pytest.approx(4.5e-14, rel=0.03)
    assert qbmgrad.tail_mass_numeric("tent", 10.0) <= qbmgrad.tail_mass_bound("tent", 10.0)
    assert qbmgrad.verify_contour_lemma(0.5, 1.0) < 1e-8
    assert qbmgrad.hoeffding_shots(1.0, 1.0, 0.1, 0.05) == 738


def test_spec_helpers():
    report = qbmgrad.grad_spec(DEMOS / "fixed_point.json")
    assert abs(report["gradient"][0]) < 1e-12
    summary, csv_text = qbmgrad.train_spec(DEMOS / "visible_1qubit_pure.json")
    assert summary["monotone"]
    assert csv_text.startswith("iter,objective,grad_norm,theta_0,wall_ms")


def test_verify_suite():
    report = qbmgrad.verify("matcalc")
    assert report["passed"]
