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

"""Writes the spec files under demos/."""

import json
import pathlib

import numpy as np
from scipy.linalg import expm

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def pauli(label):
    out = np.eye(1, dtype=complex)
    for c in label:
        out = np.kron(out, PAULI[c])
    return out


def to_json(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def visible_marginal(g, dv, dh):
    s = expm(-g)
    s /= np.trace(s).real
    return np.einsum("ahbh->ab", s.reshape(dv, dh, dv, dh))


def restricted_hamiltonian(vops, hops, a, b, w):
    dv, dh = vops[0].shape[0], hops[0].shape[0]
    g = sum(ai * np.kron(v, np.eye(dh)) for ai, v in zip(a, vops))
    g = g + sum(bj * np.kron(np.eye(dv), h) for bj, h in zip(b, hops))
    for i, v in enumerate(vops):
        for j, h in enumerate(hops):
            g = g + w[i][j] * np.kron(v, h)
    return g


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "demos"
    out.mkdir(exist_ok=True)
    specs = {}

    specs["benchmark_1qubit"] = {
        "model": {"kind": "generic", "visible": 2, "hidden": 1, "terms": ["Z"], "theta": [0.0]},
        "target": {"probabilities": [0.8, 0.2]},
        "train": {"learning_rate": 0.1, "iterations": 2000, "log_every": 1},
        "seed": 7,
    }
    specs["visible_1qubit_pure"] = {
        "model": {"kind": "generic", "visible": 2, "hidden": 1, "terms": ["Z"], "theta": [0.0]},
        "target": {"pure": [1.0, 0.0]},
        "train": {"learning_rate": 0.1, "iterations": 50},
    }

    theta = 0.5
    p0 = np.exp(-theta) / (2 * np.cosh(theta))
    specs["fixed_point"] = {
        "model": {"kind": "generic", "visible": 2, "hidden": 1, "terms": ["Z"], "theta": [theta]},
        "target": {"probabilities": [p0, 1.0 - p0]},
        "train": {"learning_rate": 0.1, "iterations": 20},
    }

    vlabels, hlabels = ["ZI", "IZ", "XI", "IX"], ["Z", "X"]
    rng = np.random.default_rng(11)
    a_true = rng.normal(0, 0.6, 4)
    b_true = rng.normal(0, 0.6, 2)
    w_true = rng.normal(0, 0.6, (4, 2))
    g_true = restricted_hamiltonian([pauli(v) for v in vlabels], [pauli(h) for h in hlabels],
                                    a_true, b_true, w_true)
    rho = visible_marginal(g_true, 4, 2)
    specs["restricted_2v1h"] = {
        "model": {
            "kind": "restricted", "structure": "quantum", "visible": 4, "hidden": 2,
            "visible_ops": vlabels, "hidden_ops": hlabels,
            "a": [0.0] * 4, "b": [0.0] * 2,
            "w": [[0.1, -0.1], [0.05, 0.1], [-0.1, 0.05], [0.1, 0.0]],
        },
        "target": {"density_matrix": to_json(rho)},
        "train": {"learning_rate": 0.5, "iterations": 1500},
        "seed": 3,
    }

    specs["cq_2bit"] = {
        "model": {
            "kind": "cq", "visible": 4, "hidden": 2,
            "terms": ["ZII", "IZI", "ZZI", "IIX", "ZIX", "IZZ"],
            "theta": [0.0] * 6,
        },
        "target": {"probabilities": [0.4, 0.1, 0.2, 0.3]},
        "train": {"learning_rate": 0.05, "iterations": 500},
    }

    specs["qc_1v1h"] = {
        "model": {
            "kind": "qc", "visible": 2, "hidden": 2,
            "terms": ["XZ", "ZI", "YZ", "XI", "IZ"],
            "theta": [0.1, 0.1, -0.1, 0.0, 0.2],
        },
        "target": {"density_matrix": [[[0.7, 0.0], [0.1, -0.2]], [[0.1, 0.2], [0.3, 0.0]]]},
        "train": {"learning_rate": 0.2, "iterations": 400},
    }

    specs["classical_rbm"] = {
        "model": {
            "kind": "classical", "visible": 4, "hidden": 2,
            "energies": [
                [[1, 1], [1, 1], [-1, -1], [-1, -1]],
                [[1, 1], [-1, -1], [1, 1], [-1, -1]],
                [[1, -1], [1, -1], [1, -1], [1, -1]],
                [[1, -1], [-1, 1], [-1, 1], [1, -1]],
                [[1, -1], [1, -1], [-1, 1], [-1, 1]],
                [[1, 1], [-1, -1], [-1, -1], [1, 1]],
            ],
            "theta": [0.1, -0.1, 0.2, 0.1, -0.05, 0.0],
        },
        "target": {"probabilities": [0.45, 0.05, 0.05, 0.45]},
        "train": {"learning_rate": 0.2, "iterations": 400},
    }

    sigma = np.array([[0.5, 0.1 - 0.05j, 0.0, 0.02], [0.1 + 0.05j, 0.2, 0.03j, 0.0],
                      [0.0, -0.03j, 0.2, 0.05], [0.02, 0.0, 0.05, 0.1]])
    specs["estimate_2v1h"] = {
        "model": {
            "kind": "generic", "visible": 4, "hidden": 2,
            "terms": ["ZIZ", "XXI", "IZX"],
            "theta": [0.2, -0.15, 0.1],
        },
        "target": {"density_matrix": to_json(sigma)},
        "estimate": {"epsilon": 0.05, "delta": 0.05, "shots": 0, "term": 0},
        "train": {"learning_rate": 0.2, "iterations": 100},
        "seed": 2026,
    }

    specs["tsallis_2v1h"] = {
        "model": {
            "kind": "generic", "visible": 4, "hidden": 2,
            "terms": ["ZIZ", "XXI", "IZX", "ZZI", "IXI"],
            "theta": [0.2, -0.15, 0.1, 0.3, -0.2],
        },
        "target": {"density_matrix": to_json(sigma)},
        "objective": {"kind": "tsallis", "q": 1.5},
        "train": {"learning_rate": 0.2, "iterations": 200},
    }

    specs["shot_train_1qubit"] = {
        "model": {"kind": "generic", "visible": 2, "hidden": 1, "terms": ["Z"], "theta": [0.0]},
        "target": {"probabilities": [0.8, 0.2]},
        "estimate": {"epsilon": 0.05, "delta": 0.05, "shots": 4000},
        "train": {"learning_rate": 0.5, "iterations": 40, "mode": "shot"},
        "seed": 99,
    }

    for name, spec in specs.items():
        spec = {"name": name, **spec}
        (out / f"{name}.json").write_text(json.dumps(spec, indent=2) + "\n")


if __name__ == "__main__":
    main()
