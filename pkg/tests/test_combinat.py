from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sosclique.combinat import (
    SubsetIndexer,
    binomial,
    binomial_table,
    colex_rank_rows,
    colex_subsets,
    elements_of,
    format_subset,
    mask_of,
    membership_matrix,
    parse_subset,
    subsets_up_to,
)


def colex_oracle(n, r):
    return sorted(combinations(range(n), r), key=lambda s: tuple(reversed(s)))


@pytest.mark.parametrize("n,k,expected", [(5, 2, 10), (4, 0, 1), (3, 5, 0), (0, 0, 1), (4, -1, 0)])
def test_binomial_small(n, k, expected):
    assert binomial(n, k) == expected


def test_binomial_pascal_exhaustive():
    for n in range(1, 65):
        for k in range(n + 1):
            assert binomial(n, k) == binomial(n - 1, k) + binomial(n - 1, k - 1)


def test_binomial_big_values_exact():
    assert binomial(300, 150) == comb(300, 150)


def test_binomial_table_matches_scalar():
    table = binomial_table(20, 5)
    for n in range(21):
        for k in range(6):
            assert table[n, k] == binomial(n, k)


@pytest.mark.parametrize("n,r,subset,index", [(4, 2, (0, 1), 0), (4, 2, (2, 3), 5), (5, 2, (0, 3), 3)])
def test_rank_examples(n, r, subset, index):
    assert SubsetIndexer(n, r).rank(subset) == index


@pytest.mark.parametrize("n,r,index,subset", [(4, 2, 0, (0, 1)), (4, 2, 5, (2, 3)), (5, 3, 9, (2, 3, 4))])
def test_unrank_examples(n, r, index, subset):
    assert SubsetIndexer(n, r).unrank(index) == subset


def test_rank_errors():
    idx = SubsetIndexer(5, 2)
    with pytest.raises(ValueError):
        idx.rank((0, 1, 2))
    with pytest.raises(ValueError):
        idx.rank((0, 7))
    with pytest.raises(ValueError):
        idx.unrank(10)
    with pytest.raises(ValueError):
        idx.unrank(-1)


def test_rank_unrank_exhaustive():
    for n in range(0, 21):
        for r in range(0, min(n, 4) + 1):
            idx = SubsetIndexer(n, r)
            assert len(idx) == binomial(n, r)
            for i in range(len(idx)):
                assert idx.rank(idx.unrank(i)) == i


def test_colex_order_matches_oracle():
    for n, r in [(5, 2), (6, 3), (7, 1), (6, 0)]:
        got = [tuple(row) for row in colex_subsets(n, r).tolist()]
        assert got == colex_oracle(n, r)
        idx = SubsetIndexer(n, r)
        assert [idx.rank(s) for s in got] == list(range(len(got)))


def test_colex_rank_rows_vectorized():
    subsets = colex_subsets(8, 3)
    members = membership_matrix(subsets, 8)
    ranks = colex_rank_rows(members, binomial_table(8, 3))
    assert np.array_equal(ranks, np.arange(len(subsets)))


def test_subsets_up_to_ordering():
    out = subsets_up_to(4, 2)
    assert out[0] == ()
    assert len(out) == 1 + 4 + 6
    assert out[1:5] == [(0,), (1,), (2,), (3,)]


@given(st.sets(st.integers(0, 40), max_size=6))
def test_mask_roundtrip(subset):
    assert elements_of(mask_of(subset)) == tuple(sorted(subset))


@given(st.sets(st.integers(0, 30), max_size=5))
def test_label_roundtrip(subset):
    label = format_subset(subset)
    assert parse_subset(label) == tuple(sorted(subset))


def test_label_format():
    assert format_subset([2, 0]) == "{0,2}"
    assert format_subset([]) == "{}"


fractions = st.fractions(max_denominator=10**6).filter(lambda f: abs(f) < 10**9)


@given(fractions, fractions, fractions)
def test_rational_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    s = a * b + c
    from math import gcd
    assert gcd(s.numerator, s.denominator) == 1
