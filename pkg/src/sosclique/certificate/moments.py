"""The moment functional ``M(X_I) = deg_G(I) C(k,|I|) / C(2r,|I|)`` and its matrices."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from ..combinat import (
    SubsetIndexer,
    binomial,
    binomial_table,
    colex_rank_rows,
    colex_subsets,
    membership_matrix,
    subsets_up_to,
)
from ..graphs import Graph, clique_array, clique_degree
from ..ratmat import RatMatrix
from .params import CertificateParams

__all__ = [
    "DegreeTable",
    "MomentFunctional",
    "moment_value",
    "build_m",
    "build_full_moment_matrix",
    "build_grigoriev",
    "full_index",
    "clique_rows",
]

# rows of union memberships handled at once (bounded memory)
_CHUNK_CELLS = 1 << 21
_MASK_BITS = 63


class DegreeTable:
    """``deg_G(I)`` for every ``|I| <= 2r``, from one pass over the 2r-cliques.

    Each 2r-clique adds one to each of its ``2^(2r)`` subsets.  Subsets are
    keyed by ``rank * (2r + 1) + size`` with ``rank`` the colex rank inside
    their size class; only nonzero degrees are stored.
    """

    def __init__(self, graph: Graph, r: int):
        self.graph = graph
        self.r = r
        top = 2 * r
        if top > graph.n:
            raise ValueError(f"need 2r <= n, got n={graph.n}, r={r}")
        self.table = binomial_table(graph.n, top)
        cliques = clique_array(graph, top)
        keys = []
        for size in range(top + 1):
            for pos in combinations(range(top), size):
                sub = cliques[:, list(pos)]
                keys.append(self._key(sub, size))
        all_keys = np.concatenate(keys) if keys else np.zeros(0, dtype=np.int64)
        self.keys, self.counts = np.unique(all_keys, return_counts=True)
        # bitmask keys give a faster lookup when a vertex set fits in one word
        self.mask_keys = self.mask_counts = None
        if graph.n <= _MASK_BITS:
            masks = []
            for size in range(top + 1):
                for pos in combinations(range(top), size):
                    bits = np.zeros(len(cliques), dtype=np.uint64)
                    for c in pos:
                        bits |= np.uint64(1) << cliques[:, c].astype(np.uint64)
                    masks.append(bits)
            self.mask_keys, self.mask_counts = np.unique(np.concatenate(masks), return_counts=True)

    def lookup_masks(self, masks: np.ndarray) -> np.ndarray:
        """Degrees of subsets given as uint64 bitmasks (requires ``n <= 63``)."""
        if self.mask_keys is None:
            raise ValueError("bitmask lookup needs n <= 63")
        if len(self.mask_keys) == 0:
            return np.zeros(np.shape(masks), dtype=np.int64)
        pos = np.minimum(np.searchsorted(self.mask_keys, masks), len(self.mask_keys) - 1)
        return np.where(self.mask_keys[pos] == masks, self.mask_counts[pos], 0).astype(np.int64)

    def _key(self, sorted_rows: np.ndarray, size: int) -> np.ndarray:
        rank = np.zeros(len(sorted_rows), dtype=np.int64)
        for c in range(size):
            rank += self.table[sorted_rows[:, c], c + 1]
        return rank * (2 * self.r + 1) + size

    def lookup_keys(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, max(len(self.keys) - 1, 0))
        if len(self.keys) == 0:
            return np.zeros(np.shape(keys), dtype=np.int64)
        hit = self.keys[pos] == keys
        return np.where(hit, self.counts[pos], 0).astype(np.int64)

    def lookup_members(self, members: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Degrees and sizes of subsets given as boolean membership rows."""
        sizes = members.sum(axis=-1)
        if np.any(sizes > 2 * self.r):
            raise ValueError("subset larger than 2r")
        ranks = colex_rank_rows(members, self.table)
        return self.lookup_keys(ranks * (2 * self.r + 1) + sizes), sizes

    def degree(self, subset: Iterable[int]) -> int:
        items = sorted(set(subset))
        if len(items) > 2 * self.r:
            raise ValueError(f"|I| = {len(items)} exceeds 2r = {2 * self.r}")
        key = self._key(np.array([items], dtype=np.int64).reshape(1, -1), len(items))
        return int(self.lookup_keys(key)[0])

    def items(self) -> Iterator[tuple[tuple[int, ...], int]]:
        """Pairs ``(I, deg_G(I))`` for every I with nonzero degree."""
        width = 2 * self.r + 1
        for key, count in zip(self.keys.tolist(), self.counts.tolist()):
            rank, size = divmod(key, width)
            yield SubsetIndexer(self.graph.n, size).unrank(rank), count


@dataclass
class MomentFunctional:
    """Exact values ``M(X_I)`` for all ``|I| <= 2r`` on a fixed graph.

    ``overrides`` replaces individual values (keyed by frozenset) and exists
    so that checkers can be exercised on corrupted functionals.
    """

    graph: Graph
    params: CertificateParams
    overrides: dict[frozenset, Fraction] = field(default_factory=dict)
    degrees: DegreeTable | None = None

    def __post_init__(self):
        if self.graph.n != self.params.n:
            raise ValueError(f"graph has n={self.graph.n}, params have n={self.params.n}")
        if self.degrees is None:
            self.degrees = DegreeTable(self.graph, self.params.r)

    def value(self, subset: Iterable[int]) -> Fraction:
        key = frozenset(subset)
        if key in self.overrides:
            return Fraction(self.overrides[key])
        if len(key) > 2 * self.params.r:
            raise ValueError(f"|I| = {len(key)} exceeds 2r = {2 * self.params.r}")
        return self.degrees.degree(key) * self.params.moment_factor(len(key))

    def support(self) -> dict[frozenset, Fraction]:
        """Every I with a nonzero value (overrides included)."""
        out = {}
        for subset, deg in self.degrees.items():
            out[frozenset(subset)] = deg * self.params.moment_factor(len(subset))
        for key, val in self.overrides.items():
            if val:
                out[key] = Fraction(val)
            else:
                out.pop(key, None)
        return out

    def with_override(self, subset: Iterable[int], value: Fraction) -> "MomentFunctional":
        overrides = dict(self.overrides)
        overrides[frozenset(subset)] = Fraction(value)
        return MomentFunctional(self.graph, self.params, overrides, self.degrees)


def moment_value(graph: Graph, params: CertificateParams, subset: Iterable[int]) -> Fraction:
    """``deg_G(I) C(k,|I|) / C(2r,|I|)`` for a single I."""
    items = sorted(set(subset))
    if len(items) > 2 * params.r:
        raise ValueError(f"|I| = {len(items)} exceeds 2r = {2 * params.r}")
    return clique_degree(graph, items, params.r) * params.moment_factor(len(items))


def _union_moments(row_members: np.ndarray, col_members: np.ndarray,
                   degrees: DegreeTable, params: CertificateParams) -> RatMatrix:
    nrow, n = row_members.shape
    ncol = col_members.shape[0]
    factors = [params.moment_factor(s) for s in range(2 * params.r + 1)]
    if degrees.mask_keys is not None:
        weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
        row_masks = np.bitwise_or.reduce(np.where(row_members, weights, np.uint64(0)), axis=1)
        col_masks = np.bitwise_or.reduce(np.where(col_members, weights, np.uint64(0)), axis=1)
        union = row_masks[:, None] | col_masks[None, :]
        size = np.bitwise_count(union).astype(np.int64)
        return RatMatrix.from_levels(size, factors, multiplier=degrees.lookup_masks(union))
    deg = np.zeros((nrow, ncol), dtype=np.int64)
    size = np.zeros((nrow, ncol), dtype=np.int64)
    step = max(1, _CHUNK_CELLS // max(ncol * n, 1))
    for lo in range(0, nrow, step):
        union = row_members[lo:lo + step, None, :] | col_members[None, :, :]
        d, s = degrees.lookup_members(union)
        deg[lo:lo + step] = d
        size[lo:lo + step] = s
    return RatMatrix.from_levels(size, factors, multiplier=deg)


def build_m(graph: Graph, params: CertificateParams,
            degrees: DegreeTable | None = None) -> RatMatrix:
    """``M(I, J) = M(X_{I | J})`` over r-subsets in colex order."""
    degrees = degrees or DegreeTable(graph, params.r)
    members = membership_matrix(colex_subsets(graph.n, params.r), graph.n)
    return _union_moments(members, members, degrees, params)


def full_index(n: int, r: int) -> list[tuple[int, ...]]:
    """Row labels of the full moment matrix: sizes ascending, colex within size."""
    return subsets_up_to(n, r)


def build_full_moment_matrix(graph: Graph, params: CertificateParams,
                             degrees: DegreeTable | None = None) -> RatMatrix:
    """Moment matrix over all subsets of size ``<= r``."""
    degrees = degrees or DegreeTable(graph, params.r)
    members = membership_matrix(full_index(graph.n, params.r), graph.n)
    return _union_moments(members, members, degrees, params)


def build_grigoriev(n: int, r: int, k: int) -> RatMatrix:
    """``M_Gr(X_I) = C(n-|I|, 2r-|I|) C(k,|I|) / C(2r,|I|)`` over subsets of size ``<= r``."""
    params = CertificateParams(n, r, k)
    members = membership_matrix(full_index(n, r), n).astype(np.int64)
    sizes = members.sum(axis=1)
    union = sizes[:, None] + sizes[None, :] - members @ members.T
    values = [binomial(n - s, 2 * r - s) * params.moment_factor(s) for s in range(2 * r + 1)]
    return RatMatrix.from_levels(union, values)


def clique_rows(graph: Graph, subsets: np.ndarray) -> np.ndarray:
    """Boolean mask of which rows of ``subsets`` are cliques."""
    adj = graph.matrix()
    ok = np.ones(len(subsets), dtype=bool)
    for c, d in combinations(range(subsets.shape[1]), 2):
        ok &= adj[subsets[:, c], subsets[:, d]]
    return ok
