from __future__ import annotations

import io
import warnings
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import make_params
from sosclique.certificate import (
    CertificateParams,
    DegenerateCertificateError,
    DegenerateCertificateWarning,
    MomentFunctional,
    NotPSDError,
    build_full_moment_matrix,
    build_grigoriev,
    build_m,
    check_axioms,
    check_kernel_vectors,
    dump_matrix,
    format_rational,
    full_index,
    gram_feasibility,
    load_matrix,
    moment_value,
)
from sosclique.combinat import colex_subsets
from sosclique.graphs import Graph, clique_degree, count_cliques, is_clique, sample_gnp_half
from sosclique.johnson import assemble, grigoriev_coefficients, knapsack_p_coefficients, p_to_d
from sosclique.ratmat import RatMatrix
from sosclique.spectra import is_psd, numerical_rank


def brute_moment(graph, params, subset):
    subset = set(subset)
    deg = sum(1 for t in combinations(range(graph.n), 2 * params.r)
              if subset <= set(t) and is_clique(graph, t))
    return deg * Fraction(comb(params.k, len(subset)), comb(2 * params.r, len(subset)))


# parameters ---------------------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        CertificateParams(5, 0, 2)
    with pytest.raises(ValueError):
        CertificateParams(5, 3, 6)
    with pytest.warns(DegenerateCertificateWarning):
        p = CertificateParams(10, 2, 3)
    assert p.beta(0) == 0


@pytest.mark.parametrize("n,r,k", [(10, 1, 2), (20, 2, 4), (30, 3, 7), (60, 2, 5)])
def test_exponent_identity(n, r, k):
    params = CertificateParams(n, r, k)
    for i in range(r + 1):
        lhs = params.beta(i) * Fraction(2) ** (-comb(2 * r, 2) + comb(2 * r - i, 2)) * comb(n - 2 * r + i, i)
        assert lhs == params.alpha(i) / params.p(i)


def test_params_values():
    params = CertificateParams(10, 1, 2)
    assert params.betas == [1, 1]
    assert params.alphas == [Fraction(1, 2), Fraction(9, 2)]
    assert params.p(0) == Fraction(1, 2) and params.p(1) == 1


# moment values -------------------------------------------------------------

def test_moment_value_examples(four_cycle):
    assert moment_value(Graph.complete(4), CertificateParams(4, 1, 2), {0, 1}) == 1
    assert moment_value(four_cycle, CertificateParams(4, 1, 2), {0, 2}) == 0
    assert moment_value(Graph.complete(5), CertificateParams(5, 2, 4), set()) == 5
    with pytest.raises(ValueError):
        moment_value(four_cycle, CertificateParams(4, 1, 2), {0, 1, 2})


@given(st.integers(4, 8), st.integers(0, 2**40), st.integers(1, 2), st.integers(2, 6), st.data())
def test_moment_value_matches_definition(n, seed, r, k, data):
    if 2 * r > n:
        return
    g = sample_gnp_half(n, seed)
    params = make_params(n, r, k)
    subset = data.draw(st.sets(st.integers(0, n - 1), max_size=2 * r))
    assert moment_value(g, params, subset) == brute_moment(g, params, subset)
    assert MomentFunctional(g, params).value(subset) == brute_moment(g, params, subset)


def test_build_m_complete_graph():
    n, r, k = 8, 2, 5
    params = CertificateParams(n, r, k)
    m = build_m(Graph.complete(n), params)
    subsets = [tuple(s) for s in colex_subsets(n, r).tolist()]
    for a, sa in enumerate(subsets):
        for b, sb in enumerate(subsets):
            u = len(set(sa) | set(sb))
            assert m.entry(a, b) == Fraction(comb(n - u, 2 * r - u) * comb(k, u), comb(2 * r, u))


def test_build_m_vanishes_without_cliques(four_cycle):
    assert build_m(Graph.empty(6), CertificateParams(6, 1, 3)).is_zero()
    # the 4-cycle has edges but no 4-clique
    assert build_m(four_cycle, CertificateParams(4, 2, 4)).is_zero()


@given(st.integers(4, 9), st.integers(0, 2**40), st.integers(1, 2))
def test_build_m_matches_definition(n, seed, r):
    if 2 * r > n:
        return
    g = sample_gnp_half(n, seed)
    params = make_params(n, r, 2 * r + 1)
    m = build_m(g, params)
    subsets = [tuple(s) for s in colex_subsets(n, r).tolist()]
    for a, sa in enumerate(subsets):
        for b, sb in enumerate(subsets):
            assert m.entry(a, b) == brute_moment(g, params, set(sa) | set(sb))


def test_build_m_large_n_uses_rank_path():
    # n > 63 forces the rank-key lookup instead of 64-bit masks
    g = sample_gnp_half(70, 3)
    params = CertificateParams(70, 1, 3)
    m = build_m(g, params)
    subsets = colex_subsets(70, 1)
    for a in range(0, 70, 7):
        for b in range(0, 70, 9):
            union = set(subsets[a].tolist()) | set(subsets[b].tolist())
            assert m.entry(a, b) == moment_value(g, params, union)


def test_full_moment_matrix_entries():
    g = sample_gnp_half(9, 4)
    params = CertificateParams(9, 2, 4)
    full = build_full_moment_matrix(g, params)
    index = full_index(9, 2)
    assert index[0] == ()
    assert full.entry(0, 0) == count_cliques(g, 4)
    for pos in range(1, 10):
        (i,) = index[pos]
        assert full.entry(pos, 0) == clique_degree(g, {i}, 2) * Fraction(4, 4)
    for pos, s in enumerate(index):
        if len(s) == 2 and not is_clique(g, s):
            assert all(full.entry(pos, q) == 0 for q in range(len(index)))


def test_grigoriev_examples():
    n, r, k = 9, 2, 5
    gr = build_grigoriev(n, r, k)
    assert gr == build_full_moment_matrix(Graph.complete(n), CertificateParams(n, r, k))
    assert gr.entry(0, 0) == comb(n, 2 * r)


def test_grigoriev_r_block_is_scheme_matrix():
    n, r, k = 12, 2, 6
    gr = build_grigoriev(n, r, k)
    lo = 1 + n
    block = gr.take(np.arange(lo, lo + comb(n, r)))
    assert block == assemble(grigoriev_coefficients(n, r, k))
    assert p_to_d(knapsack_p_coefficients(n, r, k)) == grigoriev_coefficients(n, r, k)


# exact checks ----------------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_axioms_hold_on_samples(seed):
    g = sample_gnp_half(20, seed)
    report = check_axioms(MomentFunctional(g, CertificateParams(20, 2, 4)))
    assert report.ok and report.checked > 0
    assert report.non_clique == [] and report.recurrence == []


def test_axioms_edgeless():
    report = check_axioms(MomentFunctional(Graph.empty(8), CertificateParams(8, 2, 4)))
    assert report.ok


def test_axioms_detect_corruption():
    g = sample_gnp_half(12, 9)
    func = MomentFunctional(g, CertificateParams(12, 2, 4))
    clique = next(iter(k for k in func.support() if len(k) == 2))
    bumped = func.with_override(clique, func.value(clique) + 1)
    report = check_axioms(bumped)
    assert not report.ok
    assert tuple(sorted(clique)) in report.recurrence
    non_edge = next((u, v) for u, v in combinations(range(12), 2) if not g.has_edge(u, v))
    report = check_axioms(func.with_override(non_edge, Fraction(1, 3)))
    assert non_edge in report.non_clique


def test_kernel_vectors_sampled():
    g = sample_gnp_half(15, 2)
    params = CertificateParams(15, 2, 4)
    report = check_kernel_vectors(build_full_moment_matrix(g, params), g, params)
    assert report.ok
    non_cliques = sum(1 for s in combinations(range(15), 2) if not is_clique(g, s))
    assert report.kernel_lower_bound == 1 + 15 + non_cliques


def test_kernel_vectors_complete_and_edgeless():
    params = CertificateParams(7, 2, 4)
    report = check_kernel_vectors(build_grigoriev(7, 2, 4), Graph.complete(7), params)
    assert report.ok and report.kernel_lower_bound == 1 + 7
    empty = Graph.empty(7)
    full = build_full_moment_matrix(empty, params)
    report = check_kernel_vectors(full, empty, params)
    assert report.ok and report.kernel_lower_bound == report.dimension
    assert full.is_zero()


def test_kernel_vectors_detect_corruption():
    g = sample_gnp_half(10, 5)
    params = CertificateParams(10, 2, 4)
    full = build_full_moment_matrix(g, params)
    num = full.num.copy()
    num[0, 0] += 1
    report = check_kernel_vectors(RatMatrix(num, full.den), g, params)
    assert not report.ok and () in report.recurrence_failures


def test_rank_respects_kernel_bound():
    g = sample_gnp_half(12, 8)
    params = CertificateParams(12, 2, 4)
    full = build_full_moment_matrix(g, params)
    report = check_kernel_vectors(full, g, params)
    assert numerical_rank(full) <= report.dimension - report.kernel_lower_bound


def test_gram_feasibility_complete_graph():
    n, r = 8, 2
    params = CertificateParams(n, r, 2 * r)
    report = gram_feasibility(build_grigoriev(n, r, 2 * r), Graph.complete(n), params)
    assert report.feasible
    assert report.objective == pytest.approx(2 * r, abs=1e-6)


def test_gram_feasibility_sampled():
    g = sample_gnp_half(14, 21)
    params = CertificateParams(14, 2, 4)
    full = build_full_moment_matrix(g, params)
    assert is_psd(full, 1e-9).psd
    report = gram_feasibility(full, g, params)
    assert report.feasible and report.max_non_edge <= 1e-6


def test_gram_errors():
    params = CertificateParams(6, 2, 4)
    with pytest.raises(DegenerateCertificateError):
        gram_feasibility(build_full_moment_matrix(Graph.empty(6), params), Graph.empty(6), params)
    full = build_grigoriev(6, 2, 4)
    num = full.num.copy()
    dim = num.shape[0]
    num[1:, 1:] -= 10 * full.den * np.eye(dim - 1, dtype=np.int64) * int(full.max_abs())
    with pytest.raises(NotPSDError):
        gram_feasibility(RatMatrix(num, full.den), Graph.complete(6), params)


# serialization ---------------------------------------------------------------

def test_format_rational():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(-4, 2)) == "-2"
    assert format_rational(0) == "0"


@given(st.integers(4, 8), st.integers(0, 2**30))
def test_matrix_dump_roundtrip(n, seed):
    g = sample_gnp_half(n, seed)
    params = CertificateParams(n, 1, 3)
    m = build_m(g, params)
    labels = [tuple(s) for s in colex_subsets(n, 1).tolist()]
    buf = io.StringIO()
    dump_matrix(m, labels, buf, {"seed": seed, "n": n})
    buf.seek(0)
    loaded = load_matrix(buf)
    assert loaded.matrix == m
    assert loaded.labels == labels
    assert loaded.metadata == {"seed": seed, "n": n}


def test_matrix_dump_file(tmp_path):
    m = RatMatrix.from_fractions([[Fraction(1, 3), -2], [-2, Fraction(7, 5)]])
    path = tmp_path / "m.csv"
    dump_matrix(m, [(0,), (1,)], path)
    text = path.read_text()
    assert text.splitlines()[0] == "{0},{1}"
    assert "1/3" in text and "7/5" in text
    assert load_matrix(path).matrix == m


def test_matrix_dump_rejects_bad_shapes(tmp_path):
    m = RatMatrix.from_fractions([[1]])
    with pytest.raises(ValueError):
        dump_matrix(m, [(0,), (1,)], tmp_path / "x.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text('"{0}","{1}"\n1,2\n')
    with pytest.raises(ValueError):
        load_matrix(bad)
