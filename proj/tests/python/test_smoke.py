# Copyright 2026 The hforge Authors
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

import json
import math

import numpy as np
import pytest

import hforge

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def test_version():
    assert hforge.__version__ == "0.1.0"


def test_herm_expm_matches_closed_form():
    u = hforge.herm_expm(hforge.pauli_x(), 0.3)
    expected = math.cos(0.3) * np.eye(2) - 1j * math.sin(0.3) * np.array([[0, 1], [1, 0]])
    assert np.allclose(u, expected, atol=1e-14)


def test_lambda_hadamard():
    g = hforge.lambda_resonant_gate(math.pi / 4)
    assert hforge.phase_aligned_distance(g.gate, HADAMARD) < 1e-10
    assert g.max_K_norm < 1e-8


def test_berry_phase_solid_angle():
    theta = math.pi / 3
    gamma = hforge.berry_phase_spin(theta)
    assert abs(gamma + math.pi * (1 - math.cos(theta))) < 1e-4


def test_ns_dimensions_four_qubits():
    assert hforge.ns_dimensions(4) == [(0.0, 2, 1), (1.0, 3, 3), (2.0, 1, 5)]


def test_unoptimized_nv_hadamard_is_not_robust():
    assert 0.92 < hforge.nv_hadamard_fidelity() < 0.97


def test_library_errors_map_to_python():
    with pytest.raises(hforge.HforgeError, match="PulseShapeError"):
        hforge.lambda_resonant_gate(0.5, shape="gaussian")


def test_scenario_run_and_validate():
    cfg = {"kind": "scheme", "scheme": "lambda_resonant", "parameters": {"theta": math.pi / 4, "expected": "hadamard"}}
    code, report, csv = hforge.run(cfg)
    assert code == 0 and report["passed"] and csv == ""
    assert hforge.validate_config(json.dumps(cfg)) == []
    bad = hforge.validate_config(json.dumps({"kind": "scheme", "scheme": "lambda_resonant", "parameters": {}}))
    assert any("theta" in d for d in bad)
    with pytest.raises(hforge.HforgeError):
        hforge.run({"kind": "scheme", "scheme": "lambda_resonant", "parameters": {}})
    names = [s["scheme"] for s in json.loads(hforge.scheme_catalog())["schemes"]]
    assert "lambda_resonant" in names
