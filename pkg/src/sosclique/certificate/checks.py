"""Exact axiom and kernel checks, plus the numerical Gram-vector feasibility test."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from ..combinat import binomial, binomial_table, colex_rank_rows, membership_matrix
from ..graphs import Graph, is_clique
from ..ratmat import RatMatrix
from .moments import MomentFunctional, full_index
from .params import CertificateParams

__all__ = [
    "AxiomReport",
    "KernelReport",
    "GramReport",
    "DegenerateCertificateError",
    "NotPSDError",
    "check_axioms",
    "check_kernel_vectors",
    "gram_feasibility",
]


class DegenerateCertificateError(ValueError):
    """The graph has no 2r-clique, so the moment matrix is identically zero."""


class NotPSDError(ValueError):
    """The matrix has an eigenvalue below the negative tolerance."""


@dataclass
class AxiomReport:
    """Subsets violating ``M(X_I) = 0`` off cliques, or the degree recurrence."""

    non_clique: list[tuple[int, ...]] = field(default_factory=list)
    recurrence: list[tuple[int, ...]] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.non_clique and not self.recurrence

    def as_dict(self) -> dict:
        return {"ok": self.ok, **asdict(self)}


def check_axioms(functional: MomentFunctional) -> AxiomReport:
    """Verify, in exact rationals, the two families of constraints.

    (a) ``value(I) = 0`` for every non-clique ``|I| <= 2r``;
    (b) ``(|I| - k) value(I) + sum_{j not in I} value(I + j) = 0`` for ``|I| < 2r``.

    Only subsets that are in the support, or one element short of a support
    set, can make (b) nonzero, so exactly those are examined.
    """
    params = functional.params
    top = 2 * params.r
    support = {key: val for key, val in functional.support().items() if len(key) <= top}
    report = AxiomReport()
    for key in support:
        if not is_clique(functional.graph, key):
            report.non_clique.append(tuple(sorted(key)))
    upward: dict[frozenset, Fraction] = defaultdict(Fraction)
    for key, val in support.items():
        for j in key:
            upward[key - {j}] += val
    candidates = {key for key in support if len(key) < top} | set(upward)
    for key in candidates:
        total = (len(key) - params.k) * support.get(key, Fraction(0)) + upward.get(key, Fraction(0))
        if total != 0:
            report.recurrence.append(tuple(sorted(key)))
    report.checked = len(candidates)
    report.non_clique.sort()
    report.recurrence.sort(key=lambda s: (len(s), s))
    return report


@dataclass
class KernelReport:
    """Kernel vectors of the full moment matrix that failed to be annihilated."""

    dimension: int
    kernel_lower_bound: int
    recurrence_vectors: int
    non_clique_vectors: int
    recurrence_failures: list[tuple[int, ...]] = field(default_factory=list)
    non_clique_failures: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.recurrence_failures and not self.non_clique_failures

    def as_dict(self) -> dict:
        return {"ok": self.ok, **asdict(self)}


def check_kernel_vectors(full: RatMatrix, graph: Graph, params: CertificateParams) -> KernelReport:
    """Exact products with the known kernel vectors.

    ``f_J`` (``|J| < r``) has ``|J| - k`` at ``J`` and 1 at every ``J + j``;
    ``e_I`` is the unit vector of a non-clique r-set.
    """
    n, r, k = graph.n, params.r, params.k
    index = full_index(n, r)
    if full.shape != (len(index), len(index)):
        raise ValueError(f"expected a {len(index)}-dimensional full moment matrix, got {full.shape}")
    position = {frozenset(s): p for p, s in enumerate(index)}
    lower = [s for s in index if len(s) < r]
    f = np.zeros((len(index), len(lower)), dtype=np.int64)
    for col, j_set in enumerate(lower):
        f[position[frozenset(j_set)], col] = len(j_set) - k
        for j in range(n):
            if j not in j_set:
                f[position[frozenset(j_set) | {j}], col] = 1
    product = full.matmul_int(f)
    nonzero = np.any(product.num != 0, axis=0)
    report = KernelReport(dimension=len(index), kernel_lower_bound=0,
                          recurrence_vectors=len(lower), non_clique_vectors=0)
    report.recurrence_failures = [lower[c] for c in np.nonzero(nonzero)[0]]
    for p, s in enumerate(index):
        if len(s) == r and not is_clique(graph, s):
            report.non_clique_vectors += 1
            if np.any(full.num[:, p] != 0):
                report.non_clique_failures.append(s)
    report.kernel_lower_bound = sum(binomial(n, l) for l in range(r)) + report.non_clique_vectors
    return report


@dataclass
class GramReport:
    """Outcome of realizing the normalized moment matrix as Gram vectors ``U_S``."""

    dimension: int
    normalization: float
    min_eigenvalue: float
    clipped: int
    tolerance: float
    empty_norm: float
    objective: float
    k: int
    max_non_edge: float
    max_union_spread: float
    min_inner: float
    max_inner: float
    non_edge_ok: bool
    union_ok: bool
    range_ok: bool
    empty_ok: bool
    objective_ok: bool

    @property
    def feasible(self) -> bool:
        return self.non_edge_ok and self.union_ok and self.range_ok and self.empty_ok and self.objective_ok

    def as_dict(self) -> dict:
        return {"feasible": self.feasible, **asdict(self)}


def _union_keys(index: list[tuple[int, ...]], n: int, r: int) -> np.ndarray:
    members = membership_matrix(index, n)
    table = binomial_table(n, 2 * r)
    width = 2 * r + 1
    out = np.zeros((len(index), len(index)), dtype=np.int64)
    for row in range(len(index)):
        union = members[row][None, :] | members
        out[row] = colex_rank_rows(union, table) * width + union.sum(axis=1)
    return out


def gram_feasibility(full: RatMatrix, graph: Graph, params: CertificateParams,
                     tol: float = 1e-6) -> GramReport:
    """Factor ``M / M(empty, empty)`` into vectors and test the SDP constraints.

    Eigenvalues in ``[-tol * scale, 0)`` are clipped to zero; anything more
    negative raises ``NotPSDError``.  ``scale`` is ``max(1, largest eigenvalue)``
    of the normalized matrix.
    """
    n, r, k = graph.n, params.r, params.k
    index = full_index(n, r)
    if full.shape != (len(index), len(index)):
        raise ValueError(f"expected a {len(index)}-dimensional full moment matrix, got {full.shape}")
    top = full.entry(0, 0)
    if top == 0:
        raise DegenerateCertificateError("graph has no 2r-clique; the moment matrix vanishes")
    normalized = full.scale(1 / top).to_float()
    normalized = (normalized + normalized.T) / 2
    lam, vec = np.linalg.eigh(normalized)
    scale = max(1.0, float(lam[-1]))
    if lam[0] < -tol * scale:
        raise NotPSDError(f"min eigenvalue {lam[0]:.3e} below -{tol:g} * {scale:.3e}")
    clipped = int(np.sum(lam < 0))
    gram_vectors = vec * np.sqrt(np.clip(lam, 0.0, None))
    gram = gram_vectors @ gram_vectors.T

    adj = graph.matrix()
    singles = np.arange(1, n + 1)
    single_block = gram[np.ix_(singles, singles)]
    non_edge = ~adj
    np.fill_diagonal(non_edge, False)
    max_non_edge = float(np.abs(single_block[non_edge]).max()) if non_edge.any() else 0.0

    keys = _union_keys(index, n, r)
    _, inverse = np.unique(keys, return_inverse=True)
    inverse = inverse.reshape(-1)
    hi = np.full(inverse.max() + 1, -np.inf)
    lo = np.full(inverse.max() + 1, np.inf)
    np.maximum.at(hi, inverse, gram.reshape(-1))
    np.minimum.at(lo, inverse, gram.reshape(-1))
    spread = float((hi - lo).max())

    empty_norm = float(gram[0, 0])
    objective = float(np.trace(single_block))
    return GramReport(
        dimension=len(index),
        normalization=float(top),
        min_eigenvalue=float(lam[0]),
        clipped=clipped,
        tolerance=tol,
        empty_norm=empty_norm,
        objective=objective,
        k=k,
        max_non_edge=max_non_edge,
        max_union_spread=spread,
        min_inner=float(gram.min()),
        max_inner=float(gram.max()),
        non_edge_ok=max_non_edge <= tol,
        union_ok=spread <= tol,
        range_ok=bool(gram.min() >= -tol and gram.max() <= 1 + tol),
        empty_ok=abs(empty_norm - 1) <= tol,
        objective_ok=abs(objective - k) <= tol,
    )
