# Copyright 2026 The fockfusion Authors
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

"""Fock-state fusion: outcome probabilities, optimal reflectivities and growth simulation."""

from ._fockfusion import (
    CapacityError,
    PrecisionError,
    RateEstimate,
    __version__,
    doubling_expected_singles,
    expected_reduction_ops,
    fit_power_law,
    limited_recycling_success,
    optimize_eta,
    oracle_distribution,
    p_grow,
    p_sub,
    simulate,
    single_shot_rate,
    spdc_crossover,
    spdc_pprep,
    subtraction_distribution,
)

__all__ = [
    "CapacityError",
    "PrecisionError",
    "RateEstimate",
    "__version__",
    "doubling_expected_singles",
    "expected_reduction_ops",
    "fit_power_law",
    "limited_recycling_success",
    "optimize_eta",
    "oracle_distribution",
    "p_grow",
    "p_sub",
    "simulate",
    "single_shot_rate",
    "spdc_crossover",
    "spdc_pprep",
    "subtraction_distribution",
]
