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

"""Analytic gradients for quantum Boltzmann machines."""

import json
import os

from ._core import (
    InputError,
    NumericalError,
    gradient,
    hoeffding_shots,
    objective,
    pdf,
    tail_mass_bound,
    tail_mass_numeric,
    verify_contour_lemma,
    visible_marginal,
)
from . import _core

__all__ = [
    "InputError",
    "NumericalError",
    "grad_spec",
    "gradient",
    "hoeffding_shots",
    "objective",
    "pdf",
    "tail_mass_bound",
    "tail_mass_numeric",
    "train_spec",
    "verify",
    "verify_contour_lemma",
    "visible_marginal",
]


def verify(suite="all"):
    """Runs a self-check suite and returns the report as a dict."""
    return json.loads(_core._verify_json(suite))


def grad_spec(path):
    """Gradient report for a spec file, with finite-difference residuals."""
    return json.loads(_core._grad_spec_json(os.fspath(path)))


def train_spec(path):
    """Trains a spec file; returns (summary dict, trajectory CSV text)."""
    summary, csv = _core._train_spec(os.fspath(path))
    return json.loads(summary), csv
