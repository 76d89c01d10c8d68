# Copyright 2026 The tqb Authors
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

"""Transmon quantum battery charged by repeated collisions."""

from ._tqb import (
    Error,
    RangeError,
    RankDeficiencyError,
    ShapeMismatchError,
    Spectrum,
    TransmonSpec,
    ValidationError,
    ancilla_state,
    charge_matrix_element,
    classify_shape,
    ergotropy,
    feasibility_coupling,
    fit_damped_cosine,
    fit_damping_shape,
    fit_frequency_scaling,
    fit_saturation,
    parse_manifest,
    perturbative_level,
    run_protocol,
    run_sweep,
    solve_spectrum,
    stored_energy,
)

__all__ = [
    "Error",
    "RangeError",
    "RankDeficiencyError",
    "ShapeMismatchError",
    "Spectrum",
    "TransmonSpec",
    "ValidationError",
    "ancilla_state",
    "charge_matrix_element",
    "classify_shape",
    "ergotropy",
    "feasibility_coupling",
    "fit_damped_cosine",
    "fit_damping_shape",
    "fit_frequency_scaling",
    "fit_saturation",
    "parse_manifest",
    "perturbative_level",
    "run_protocol",
    "run_sweep",
    "solve_spectrum",
    "stored_energy",
]
