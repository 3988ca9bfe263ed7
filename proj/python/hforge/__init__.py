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

"""Python access to the hforge holonomic gate toolkit."""

import json

from ._hforge import (
    HforgeError,
    LambdaGate,
    ToleranceConfig,
    __version__,
    aa_phases,
    berry_phase_spin,
    gate_fidelity,
    herm_expm,
    lambda_resonant_gate,
    ns_dimensions,
    nv_hadamard_fidelity,
    pauli_x,
    pauli_y,
    pauli_z,
    phase_aligned_distance,
    run_config,
    scheme_catalog,
    validate_config,
)


def run(config, threads=1, seed=None):
    """Runs a scenario given as a dict or JSON text; returns (exit_code, report dict, csv text)."""
    text = config if isinstance(config, str) else json.dumps(config)
    out = run_config(text, threads, seed)
    if out["exit_code"] == 1:
        raise HforgeError("; ".join(out["diagnostics"]))
    return out["exit_code"], json.loads(out["report"]), out["csv"]


__all__ = [
    "HforgeError",
    "LambdaGate",
    "ToleranceConfig",
    "__version__",
    "aa_phases",
    "berry_phase_spin",
    "gate_fidelity",
    "herm_expm",
    "lambda_resonant_gate",
    "ns_dimensions",
    "nv_hadamard_fidelity",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "phase_aligned_distance",
    "run",
    "run_config",
    "scheme_catalog",
    "validate_config",
]
