"""The filled matrix ``M'``, its expectation ``E``, the local part ``L`` and ``Delta``.

``M'(I, J) = beta(|I & J|) * [every edge between I-J and J-I is present]
* c(I | J)`` where ``c(U)`` counts the ``(2r - |U|)``-cliques among the
common neighbours of ``U``.  Unlike ``M`` this does not require ``I`` or
``J`` to be cliques, and on clique rows and columns both agree.

Also here: the locally random matrices ``R_a``, the ``lift`` operator and
the brute-force ``sum_T M_T`` construction used as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from ..combinat import (
    SubsetIndexer,
    binomial,
    binomial_table,
    colex_rank_rows,
    colex_subsets,
    membership_matrix,
)
from ..graphs import Graph, count_cliques_in
from ..johnson import intersection_sizes
from ..ratmat import RatMatrix
from .params import CertificateParams

__all__ = [
    "Decomposition",
    "FilledParts",
    "filled_parts",
    "build_m_prime",
    "build_m_prime_bruteforce",
    "build_expectation",
    "build_exm",
    "build_l",
    "decompose",
    "build_r_a",
    "r_a_operator",
    "lift",
    "band",
]


@dataclass(frozen=True)
class FilledParts:
    """Per-pair ingredients shared by ``M'`` and ``L``.

    ``inter[I, J] = |I & J|``; ``cross[I, J]`` says every edge between
    ``I - J`` and ``J - I`` is present; ``count[I, J] = c(I | J)`` where
    ``cross`` holds (1 elsewhere).
    """

    inter: np.ndarray
    cross: np.ndarray
    count: np.ndarray


def filled_parts(graph: Graph, r: int) -> FilledParts:
    n = graph.n
    subsets = colex_subsets(n, r)
    members = membership_matrix(subsets, n)
    inter = intersection_sizes(n, r)
    adj = graph.matrix()
    non_adj = ~adj
    np.fill_diagonal(non_adj, False)
    b = members.astype(np.float64)
    # non_adj_count[J, u]: vertices of J (other than u) not adjacent to u
    non_adj_count = np.rint(b @ non_adj.astype(np.float64)).astype(np.int64)
    adj_count = np.rint(b @ adj.astype(np.float64)).astype(np.int64)
    size = len(subsets)
    cross = np.ones((size, size), dtype=bool)
    count = np.ones((size, size), dtype=np.int64)
    for row, elems in enumerate(subsets):
        bad = np.zeros(size, dtype=bool)
        inner = members[:, elems].astype(np.int64)
        for u in elems:
            # non-neighbours of u in J - I
            c = non_adj_count[:, u] - inner @ non_adj[u, elems].astype(np.int64)
            bad |= ~members[:, u] & (c > 0)
        cross[row] = ~bad
        common_i = adj[elems].all(axis=0)
        for level in range(1, r + 1):
            cols = np.nonzero(cross[row] & (inter[row] == level))[0]
            if len(cols) == 0:
                continue
            cn = common_i[None, :] & (adj_count[cols] == r)
            if level == 1:
                count[row, cols] = cn.sum(axis=1)
            elif level == 2:
                cnf = cn.astype(np.float64)
                edges = np.rint(((cnf @ adj.astype(np.float64)) * cnf).sum(axis=1)).astype(np.int64)
                count[row, cols] = edges // 2
            else:
                weights = [1 << v for v in range(n)]
                for idx, col in enumerate(cols):
                    mask = sum(w for w, hit in zip(weights, cn[idx]) if hit)
                    count[row, col] = count_cliques_in(graph, mask, level)
    return FilledParts(inter=inter, cross=cross, count=count)


def build_m_prime(graph: Graph, params: CertificateParams,
                  parts: FilledParts | None = None) -> RatMatrix:
    parts = parts or filled_parts(graph, params.r)
    levels = np.where(parts.cross, parts.inter, -1)
    return RatMatrix.from_levels(levels, params.betas, multiplier=np.where(parts.cross, parts.count, 0))


def build_m_prime_bruteforce(graph: Graph, params: CertificateParams) -> RatMatrix:
    """``sum over 2r-sets T`` of ``M_T``, straight from the definition.

    ``M_T(I, J) = beta(|I & J|)`` when ``I | J`` lies in ``T`` and the only
    edges of ``T`` missing from the graph have both ends in ``I`` or both in ``J``.
    """
    n, r = graph.n, params.r
    index = SubsetIndexer(n, r)
    betas = params.betas
    total = [[Fraction(0)] * index.size for _ in range(index.size)]
    for t in combinations(range(n), 2 * r):
        missing = [(u, v) for u, v in combinations(t, 2) if not graph.has_edge(u, v)]
        subs = list(combinations(t, r))
        for i_set in subs:
            for j_set in subs:
                si, sj = set(i_set), set(j_set)
                if not si | sj <= set(t):
                    continue
                if all((u in si and v in si) or (u in sj and v in sj) for u, v in missing):
                    total[index.rank(i_set)][index.rank(j_set)] += betas[len(si & sj)]
    return RatMatrix.from_fractions(total)


def build_expectation(params: CertificateParams) -> RatMatrix:
    """``E(I, J) = alpha(|I & J|)``."""
    return RatMatrix.from_levels(intersection_sizes(params.n, params.r), params.alphas)


def build_exm(params: CertificateParams) -> RatMatrix:
    """Unconditional mean of ``M``: ``C(n-s, 2r-s) C(k,s)/C(2r,s) 2^(-C(2r,2))`` with ``s = |I | J|``."""
    n, r = params.n, params.r
    scale = Fraction(1, 2 ** binomial(2 * r, 2))
    values = []
    for i in range(r + 1):
        s = 2 * r - i
        values.append(binomial(n - s, 2 * r - s) * params.moment_factor(s) * scale)
    return RatMatrix.from_levels(intersection_sizes(n, r), values)


def build_l(graph: Graph, params: CertificateParams,
            parts: FilledParts | None = None) -> RatMatrix:
    """``alpha(i)(1-p(i))/p(i)`` where the cross edges are all present, else ``-alpha(i)``."""
    parts = parts or filled_parts(graph, params.r)
    r = params.r
    present = [params.alpha(i) * (1 - params.p(i)) / params.p(i) for i in range(r + 1)]
    absent = [-params.alpha(i) for i in range(r + 1)]
    levels = np.where(parts.cross, parts.inter, parts.inter.astype(np.int64) + r + 1)
    return RatMatrix.from_levels(levels, present + absent)


@dataclass(frozen=True)
class Decomposition:
    """``M' = E + L + Delta`` exactly."""

    params: CertificateParams
    m_prime: RatMatrix
    e: RatMatrix
    l: RatMatrix
    delta: RatMatrix

    def identity_holds(self) -> bool:
        return self.e + self.l + self.delta == self.m_prime


def decompose(graph: Graph, params: CertificateParams) -> Decomposition:
    parts = filled_parts(graph, params.r)
    m_prime = build_m_prime(graph, params, parts)
    e = build_expectation(params)
    l = build_l(graph, params, parts)
    return Decomposition(params=params, m_prime=m_prime, e=e, l=l, delta=m_prime - e - l)


def band(matrix, inter: np.ndarray, i: int):
    """Keep only entries with ``|I & J| = i``."""
    mask = inter == i
    if isinstance(matrix, RatMatrix):
        return matrix.where(mask)
    return np.where(mask, matrix, 0)


# locally random matrices --------------------------------------------------

def build_r_a(graph: Graph, a: int) -> np.ndarray:
    """Dense ``R_a`` over a-subsets.

    Disjoint ``V, W`` with all ``a^2`` cross edges present give ``2^(a^2) - 1``,
    other disjoint pairs ``-1``, intersecting pairs ``0``.
    """
    n = graph.n
    if a < 1 or 2 * a > n:
        raise ValueError(f"need 1 <= a <= n/2, got a={a}, n={n}")
    members = membership_matrix(colex_subsets(n, a), n).astype(np.float64)
    cross = np.rint(members @ graph.matrix().astype(np.float64) @ members.T).astype(np.int64)
    disjoint = intersection_sizes(n, a) == 0
    full = np.where(cross == a * a, 2 ** (a * a) - 1, -1)
    return np.where(disjoint, full, 0).astype(np.int64)


def _sparse_inclusion(n: int, a: int, t: int) -> sp.csr_matrix:
    """Sparse ``Z[V, T] = [T subset of V]`` for a-subsets V and t-subsets T."""
    subsets = colex_subsets(n, a)
    table = binomial_table(n, max(t, 1))
    rows, cols = [], []
    for pos in combinations(range(a), t):
        rank = np.zeros(len(subsets), dtype=np.int64)
        for c, p in enumerate(pos):
            rank += table[subsets[:, p], c + 1]
        rows.append(np.arange(len(subsets)))
        cols.append(rank)
    data = np.ones(sum(len(x) for x in rows))
    return sp.csr_matrix((data, (np.concatenate(rows), np.concatenate(cols))),
                         shape=(len(subsets), binomial(n, t)))


def r_a_operator(graph: Graph, a: int) -> LinearOperator:
    """Matrix-free ``R_a = 2^(a^2) S - D_0``.

    ``S`` is the sparse indicator of disjoint, fully cross-connected pairs
    (row V holds the a-subsets of the common neighbourhood of V) and
    ``D_0 = sum_t (-1)^t Z_t Z_t^T`` is the disjointness matrix written via
    inclusion matrices.  Used where the dense matrix would not fit in memory.
    """
    n = graph.n
    if a < 1 or 2 * a > n:
        raise ValueError(f"need 1 <= a <= n/2, got a={a}, n={n}")
    subsets = colex_subsets(n, a)
    size = len(subsets)
    table = binomial_table(n, a)
    adj = graph.matrix()
    rows, cols = [], []
    for v_idx, elems in enumerate(subsets):
        common = np.nonzero(adj[elems].all(axis=0))[0]
        if len(common) < a:
            continue
        if a == 1:
            combos = common.reshape(-1, 1)
        elif a == 2:
            iu, ju = np.triu_indices(len(common), 1)
            combos = np.column_stack([common[iu], common[ju]])
        else:
            combos = np.array(list(combinations(common.tolist(), a)), dtype=np.int64)
        rank = np.zeros(len(combos), dtype=np.int64)
        for c in range(a):
            rank += table[combos[:, c], c + 1]
        rows.append(np.full(len(rank), v_idx))
        cols.append(rank)
    if rows:
        rr, cc = np.concatenate(rows), np.concatenate(cols)
    else:
        rr = cc = np.zeros(0, dtype=np.int64)
    s_mat = sp.csr_matrix((np.ones(len(rr)), (rr, cc)), shape=(size, size))
    incl = [_sparse_inclusion(n, a, t) for t in range(a + 1)]
    weight = float(2 ** (a * a))

    def matvec(x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        out = weight * (s_mat @ x)
        for t, z in enumerate(incl):
            out -= (-1) ** t * (z @ (z.T @ x))
        return out

    return LinearOperator((size, size), matvec=matvec, rmatvec=matvec, dtype=np.float64)


def lift(matrix, i: int, r: int, n: int):
    """``X^(i)(I, J) = X(I - J, J - I)`` when ``|I & J| = i``, else 0.

    ``matrix`` is indexed by the ``(r - i)``-subsets of ``{0..n-1}`` (colex)
    and may be a ``RatMatrix`` or an ndarray; the result has the same kind.
    """
    if not 0 <= i <= r:
        raise ValueError(f"need 0 <= i <= r, got i={i}, r={r}")
    exact = isinstance(matrix, RatMatrix)
    values = matrix.num if exact else np.asarray(matrix)
    small = r - i
    dim = binomial(n, small)
    if values.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix over {small}-subsets, got {values.shape}")
    members = membership_matrix(colex_subsets(n, r), n)
    inter = intersection_sizes(n, r)
    table = binomial_table(n, max(small, 1))
    out = np.zeros(inter.shape, dtype=values.dtype)
    for row in range(len(members)):
        cols = np.nonzero(inter[row] == i)[0]
        if len(cols) == 0:
            continue
        left = members[row][None, :] & ~members[cols]
        right = members[cols] & ~members[row][None, :]
        out[row, cols] = values[colex_rank_rows(left, table), colex_rank_rows(right, table)]
    return RatMatrix(out, matrix.den) if exact else out
