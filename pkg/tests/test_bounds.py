from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sosclique.bounds import (
    BOUNDS,
    clique_count_threshold,
    degree_center,
    degree_mcdiarmid_check,
    degree_threshold,
    delta_norm_budget,
    gershgorin_bound,
    k_threshold,
    l_norm_budget,
    mcdiarmid_tail,
    r_a_norm_bound,
    trace_method_bound,
    trace_power,
)
from sosclique.ratmat import RatMatrix
from sosclique.spectra import spectral_norm


def test_trace_method_example():
    report = trace_method_bound(1, 1, 1, 1, 100, 0.1)
    independent = 2 * math.e * (math.log(1000) / 2 + 1) * 10
    assert report.value == pytest.approx(independent, rel=1e-12)
    assert report.value == pytest.approx(242.1, abs=0.05)
    assert report.valid and report.details["q"] == trace_power(1, 1, 100, 0.1)


def test_trace_method_side_conditions():
    assert not trace_method_bound(1, 1, 1, 1, 9, 0.1).valid
    assert not trace_method_bound(1, 3, 1, 1, 100, 0.1).valid
    with pytest.raises(ValueError):
        trace_method_bound(1, 1, 1, 1, 100, 1.0)


def test_trace_method_clique_shape():
    # y = 2a, z = 0, B = 1 reduces to (2ea(ln(1/eps)/4a + 1))^(2a) n^0 / a!
    a, n, eps = 3, 50, 0.05
    value = trace_method_bound(a, 2 * a, 0, 1, n, eps).value
    expected = (2 * math.e * a * (math.log(1 / eps) / (4 * a) + 1)) ** (2 * a) / math.factorial(a)
    assert value == pytest.approx(expected, rel=1e-12)


def test_r_a_norm_examples():
    report = r_a_norm_bound(1, 100, 0.01)
    assert report.value == pytest.approx(32 * math.log(1e4) * 10, rel=1e-12)
    assert report.value == pytest.approx(2947.3, abs=0.05)
    assert r_a_norm_bound(1, 100, 1 - 1e-12).value == pytest.approx(32 * math.log(100) * 10, rel=1e-9)
    assert not r_a_norm_bound(1, 99, 0.01).valid
    assert not r_a_norm_bound(2, 40, 0.01).valid


@given(st.integers(1, 3), st.integers(100, 10**6), st.floats(1e-4, 0.99))
def test_r_a_norm_dominates_trace_specialization(a, n, eps):
    special = 2 ** (2 * a) * trace_method_bound(a, 1, 1, 2 ** (a * a), n, eps).value
    assert r_a_norm_bound(a, n, eps).value >= special * (1 - 1e-12)


def test_clique_count_examples():
    report = clique_count_threshold(3, 50, 0.05)
    assert report.value == pytest.approx(math.log(1280) ** 2 * 2500, rel=1e-12)
    assert report.value == pytest.approx(127975, rel=1e-4)
    assert report.details["mean"] == "2450"
    assert clique_count_threshold(1, 77, 0.2).value == pytest.approx(math.log(320) ** 2)
    assert clique_count_threshold(2, 10, 0.64).value == pytest.approx(math.log(100) ** 2 * 10)
    assert math.log(100) ** 2 == pytest.approx(21.2, abs=0.01)


def test_degree_examples():
    assert degree_center(2, 4, 50) == 1
    assert degree_center(2, 2, 50) == Fraction(141, 4)
    assert float(degree_center(2, 2, 50)) == 35.25
    report = degree_threshold(2, 2, 50, 0.01)
    assert report.details["center"] == "141/4"
    t = degree_threshold(1, 0, 100, 0.1)
    assert t.value == pytest.approx(2 * math.log(1280) ** 2 * 1000, rel=1e-12)
    assert t.value == pytest.approx(102380, rel=1e-4)
    with pytest.raises(ValueError):
        degree_threshold(1, 3, 100, 0.1)


def test_mcdiarmid_examples():
    assert mcdiarmid_tail(100, 1, 0).value == 1.0
    assert mcdiarmid_tail(100, 1, math.sqrt(50 * math.log(4))).value == pytest.approx(0.5, rel=1e-12)
    assert mcdiarmid_tail(100, 1, math.sqrt(100 * math.log(4))).value == pytest.approx(0.125, rel=1e-12)
    with pytest.raises(ValueError):
        mcdiarmid_tail(100, 0, 1)


@pytest.mark.parametrize("r,i,n,eps", [(1, 0, 100, 0.1), (2, 2, 50, 0.01), (2, 1, 200, 0.05), (3, 0, 30, 0.5)])
def test_degree_mcdiarmid_inversion(r, i, n, eps):
    report = degree_mcdiarmid_check(r, i, n, eps)
    assert report.valid == (report.value <= eps / 2)
    assert report.value <= eps / 2


def test_gershgorin_examples():
    assert gershgorin_bound(np.eye(4)) == 1
    assert gershgorin_bound(np.ones((6, 6))) == 6
    assert gershgorin_bound(RatMatrix.from_fractions([[Fraction(1, 2), -1], [-1, 0]])) == 1.5
    a = np.random.Generator(np.random.PCG64(9)).standard_normal((50, 50))
    a = (a + a.T) / 2
    assert gershgorin_bound(a) >= spectral_norm(a) - 1e-8


def test_k_threshold_examples():
    assert k_threshold(math.e ** 2, 1, 0) == pytest.approx(math.e / 2, rel=1e-12)
    values = [k_threshold(n, 2, 1.0) for n in (100, 1000, 10**4, 10**6)]
    assert values == sorted(values)
    assert k_threshold(1e6, 60, 1.0) < 1e-15
    with pytest.raises(ValueError):
        k_threshold(1e6, 1, -1)


def test_budgets_non_normative():
    l = l_norm_budget(100, 1, 4, 2.0)
    d = delta_norm_budget(100, 1, 4, 2.0)
    assert l.value == d.value
    assert l.value == pytest.approx(2 ** 2 * 4 ** 2 * 100 * math.log(100) / 10)
    assert l.details["normative"] is False
    assert d.valid == (100 > 2.0 * 2 ** 4)
    assert not delta_norm_budget(100, 2, 4, 1.0).valid


def test_pure_and_serializable():
    for fn, args in [(trace_method_bound, (2, 1, 1, 4, 100, 0.1)), (r_a_norm_bound, (2, 150, 0.01)),
                     (clique_count_threshold, (3, 50, 0.05)), (degree_threshold, (2, 2, 50, 0.1))]:
        first, second = fn(*args), fn(*args)
        assert first.value == second.value
        assert json.loads(first.to_json())["value"] == first.value
    assert set(BOUNDS) >= {"trace", "r_a", "clique_count", "degree", "mcdiarmid", "k_threshold"}
