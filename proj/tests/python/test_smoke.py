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

import math

import pytest

import fockfusion as ff


def test_hom_dip():
    assert ff.p_sub(0, 1, 1, math.sqrt(0.5)) == pytest.approx(0.5, abs=1e-14)
    assert ff.p_sub(1, 1, 1, math.sqrt(0.5)) == pytest.approx(0.0, abs=1e-14)


def test_distribution_matches_oracles():
    closed = ff.subtraction_distribution(4, 3, 0.4)
    assert sum(closed) == pytest.approx(1.0, abs=1e-12)
    for method in ("matrix", "convolution"):
        other = ff.oracle_distribution(4, 3, 0.4, method=method)
        assert other == pytest.approx(closed, abs=1e-10)


def test_vacuum_input():
    assert ff.subtraction_distribution(1, 0, 0.6) == pytest.approx([0.64, 0.36])


def test_optimizer_diagonal():
    eta, p = ff.optimize_eta("recycled-grow", 5, 5)
    assert p == pytest.approx(0.5, abs=1e-6)
    assert 0.0 <= eta <= 1.0


def test_simulate_d2():
    est = ff.simulate(2, steps=200_000, seed=3)
    assert abs(est.rate - 0.5) <= 3 * est.stderr
    again = ff.simulate(2, steps=200_000, seed=3)
    assert again.harvested == est.harvested


def test_baselines():
    assert ff.doubling_expected_singles(4)["expected_singles"] == pytest.approx(64 / 3)
    assert ff.single_shot_rate(20) == pytest.approx(1.1601e-9, rel=1e-4)
    assert 0.30 <= ff.limited_recycling_success(200) <= 0.36
    nbar = ff.spdc_crossover(20, 1e-3)
    assert ff.spdc_pprep(nbar, 20) == pytest.approx(1e-3, rel=1e-9)


def test_errors():
    with pytest.raises(ff.CapacityError):
        ff.oracle_distribution(30, 30, 0.5)
    with pytest.raises(ValueError):
        ff.p_sub(0, 1, 1, 0.5, precision="fast")
    with pytest.raises(ValueError):
        ff.simulate(1)
