"""Exact combinatorial primitives: binomials, rationals and colex subset ranking.

Every matrix in this package is indexed by vertex subsets listed in
*colexicographic* order: ``S < T`` iff the largest element of the symmetric
difference lies in ``T``.  For r-subsets of ``{0..n-1}`` the colex rank of a
sorted subset ``s_0 < s_1 < ... < s_{r-1}`` is ``sum_i C(s_i, i + 1)``, which
does not depend on ``n``.  Row order of every assembled matrix depends on this
choice.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BigRational",
    "BINOMIAL_CACHE_CAP",
    "binomial",
    "binomial_table",
    "SubsetIndexer",
    "colex_subsets",
    "membership_matrix",
    "colex_rank_rows",
    "subsets_up_to",
    "format_subset",
    "parse_subset",
    "mask_of",
    "elements_of",
]

#: Exact rational type used everywhere.  ``fractions.Fraction`` always
#: reduces to lowest terms with a positive denominator.
BigRational = Fraction

#: Binomials with ``n`` up to this cap are memoized.
BINOMIAL_CACHE_CAP = 256


@lru_cache(maxsize=None)
def _binomial_cached(n: int, k: int) -> int:
    return math.comb(n, k)


def binomial(n: int, k: int) -> int:
    """C(n, k) as an exact integer; 0 when ``k < 0`` or ``k > n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    if n <= BINOMIAL_CACHE_CAP:
        return _binomial_cached(n, k)
    return math.comb(n, k)


def binomial_table(n_max: int, k_max: int) -> np.ndarray:
    """int64 table ``T[v, c] = C(v, c)`` for ``0 <= v <= n_max``, ``0 <= c <= k_max``.

    Raises OverflowError if an entry does not fit in int64.
    """
    table = np.zeros((n_max + 1, k_max + 1), dtype=np.int64)
    for v in range(n_max + 1):
        for c in range(min(v, k_max) + 1):
            value = binomial(v, c)
            if value >= 2**63:
                raise OverflowError(f"C({v},{c}) does not fit in int64")
            table[v, c] = value
    return table


def mask_of(subset: Iterable[int]) -> int:
    """Bitmask (Python int) of a vertex set."""
    mask = 0
    for v in subset:
        mask |= 1 << v
    return mask


def elements_of(mask: int) -> tuple[int, ...]:
    """Sorted elements of a bitmask."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


class SubsetIndexer:
    """Colex bijection between r-subsets of ``{0..n-1}`` and ``0..C(n,r)-1``."""

    __slots__ = ("n", "r", "size")

    def __init__(self, n: int, r: int):
        if n < 0 or r < 0 or r > n:
            raise ValueError(f"need 0 <= r <= n, got n={n}, r={r}")
        self.n = n
        self.r = r
        self.size = binomial(n, r)

    def __repr__(self) -> str:
        return f"SubsetIndexer(n={self.n}, r={self.r})"

    def __len__(self) -> int:
        return self.size

    def rank(self, subset: Iterable[int]) -> int:
        items = sorted(subset)
        if len(items) != self.r or len(set(items)) != self.r:
            raise ValueError(f"expected {self.r} distinct elements, got {items}")
        if items and (items[0] < 0 or items[-1] >= self.n):
            raise ValueError(f"elements of {items} out of range 0..{self.n - 1}")
        return sum(binomial(v, i + 1) for i, v in enumerate(items))

    def unrank(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} out of range 0..{self.size - 1}")
        out = []
        v = self.n - 1
        for i in range(self.r, 0, -1):
            # largest v with C(v, i) <= index
            while binomial(v, i) > index:
                v -= 1
            out.append(v)
            index -= binomial(v, i)
            v -= 1
        return tuple(reversed(out))

    def subsets(self) -> np.ndarray:
        """All r-subsets as an ``(C(n,r), r)`` int array in colex order."""
        return colex_subsets(self.n, self.r)


def colex_subsets(n: int, r: int) -> np.ndarray:
    """All r-subsets of ``range(n)`` as sorted rows, in colex order."""
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    rows = np.array(list(combinations(range(n), r)), dtype=np.int64).reshape(-1, r)
    # lexsort: last key is primary, so the largest element dominates
    order = np.lexsort(tuple(rows[:, c] for c in range(r)))
    return rows[order]


def membership_matrix(subsets: np.ndarray | Sequence[Sequence[int]], n: int) -> np.ndarray:
    """Boolean ``(len(subsets), n)`` indicator matrix of a subset family."""
    if isinstance(subsets, np.ndarray) and subsets.ndim == 2:
        out = np.zeros((subsets.shape[0], n), dtype=bool)
        if subsets.shape[1]:
            rows = np.repeat(np.arange(subsets.shape[0]), subsets.shape[1])
            out[rows, subsets.ravel()] = True
        return out
    out = np.zeros((len(subsets), n), dtype=bool)
    for row, s in enumerate(subsets):
        out[row, list(s)] = True
    return out


def colex_rank_rows(members: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Colex rank of each boolean membership row, within its own size class.

    ``table`` must be a ``binomial_table`` with at least ``n - 1`` rows and as
    many columns as the largest row size.
    """
    members = np.asarray(members, dtype=bool)
    if members.shape[-1] == 0:
        return np.zeros(members.shape[:-1], dtype=np.int64)
    position = np.cumsum(members, axis=-1)
    position = np.minimum(position, table.shape[1] - 1)
    vertices = np.arange(members.shape[-1])
    return np.where(members, table[vertices, position], 0).sum(axis=-1)


def subsets_up_to(n: int, r: int) -> list[tuple[int, ...]]:
    """All subsets of size <= r: sizes ascending, colex within each size."""
    out: list[tuple[int, ...]] = []
    for size in range(r + 1):
        out.extend(tuple(int(v) for v in row) for row in colex_subsets(n, size))
    return out


def format_subset(subset: Iterable[int]) -> str:
    """Label like ``{0,2,5}``."""
    return "{" + ",".join(str(v) for v in sorted(subset)) + "}"


def parse_subset(label: str) -> tuple[int, ...]:
    text = label.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"bad subset label {label!r}")
    body = text[1:-1].strip()
    if not body:
        return ()
    return tuple(sorted(int(tok) for tok in body.split(",")))
