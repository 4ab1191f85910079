"""The Johnson scheme on r-subsets of ``{0..n-1}``.

A matrix indexed by r-subsets is *set-symmetric* when its ``(I, J)`` entry
depends only on ``|I & J|``.  Two bases span that algebra:

* ``D_l(I, J) = [|I & J| = l]``
* ``P_t(I, J) = C(|I & J|, t)``, a sum of rank-one products, hence PSD.

All ``P_t`` share the eigenspaces ``V_0, ..., V_r`` (``dim V_j = C(n,j) - C(n,j-1)``)
and on ``V_j`` the matrix ``P_t`` acts as ``C(n-t-j, r-t) * C(r-j, t-j)``.
Spectra below are computed exactly from those closed forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .combinat import binomial, colex_subsets, membership_matrix
from .ratmat import RatMatrix

__all__ = [
    "SchemeVector",
    "LevelSpectrum",
    "MinEigenvalue",
    "intersection_sizes",
    "inclusion_matrix",
    "assemble_d",
    "assemble_p",
    "assemble_p_rank_one",
    "assemble",
    "d_to_p",
    "p_to_d",
    "p_eigenvalue",
    "multiplicities",
    "scheme_spectrum",
    "q_upper_bound",
    "expectation_coefficients",
    "e_p_coefficients",
    "e_min_eigenvalue",
    "grigoriev_coefficients",
    "knapsack_p_coefficients",
]


def _check_scheme(n: int, r: int) -> None:
    if r < 0 or n < 0:
        raise ValueError(f"need n, r >= 0, got n={n}, r={r}")
    if 2 * r > n:
        raise ValueError(f"Johnson scheme needs r <= n/2, got n={n}, r={r}")


@dataclass(frozen=True)
class SchemeVector:
    """Coefficients of a set-symmetric matrix in the ``D`` or ``P`` basis."""

    n: int
    r: int
    basis: str
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.basis not in ("D", "P"):
            raise ValueError(f"basis must be 'D' or 'P', got {self.basis!r}")
        _check_scheme(self.n, self.r)
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != self.r + 1:
            raise ValueError(f"expected {self.r + 1} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def d(cls, n: int, r: int, coeffs: Sequence) -> "SchemeVector":
        return cls(n, r, "D", tuple(coeffs))

    @classmethod
    def p(cls, n: int, r: int, coeffs: Sequence) -> "SchemeVector":
        return cls(n, r, "P", tuple(coeffs))

    @classmethod
    def unit(cls, n: int, r: int, basis: str, index: int) -> "SchemeVector":
        coeffs = [Fraction(0)] * (r + 1)
        coeffs[index] = Fraction(1)
        return cls(n, r, basis, tuple(coeffs))

    def in_d(self) -> "SchemeVector":
        return self if self.basis == "D" else p_to_d(self)

    def in_p(self) -> "SchemeVector":
        return self if self.basis == "P" else d_to_p(self)


@dataclass(frozen=True)
class LevelSpectrum:
    """Eigenvalue ``eigenvalues[j]`` on ``V_j``, with multiplicity ``multiplicities[j]``."""

    eigenvalues: tuple[Fraction, ...]
    multiplicities: tuple[int, ...]

    @property
    def trace(self) -> Fraction:
        return sum((m * lam for m, lam in zip(self.multiplicities, self.eigenvalues)), Fraction(0))

    @property
    def minimum(self) -> Fraction:
        return min(lam for lam, m in zip(self.eigenvalues, self.multiplicities) if m > 0)

    def multiset(self) -> np.ndarray:
        """All ``C(n, r)`` eigenvalues as sorted floats."""
        values = np.repeat([float(x) for x in self.eigenvalues], self.multiplicities)
        return np.sort(values)


@dataclass(frozen=True)
class MinEigenvalue:
    """Minimum eigenvalue report for ``E``: ``value = alpha_r`` when ``all_positive``."""

    value: Fraction
    all_positive: bool
    condition_holds: bool
    alphas: tuple[Fraction, ...]


# assembly ---------------------------------------------------------------

@lru_cache(maxsize=16)
def _intersections(n: int, r: int) -> np.ndarray:
    members = membership_matrix(colex_subsets(n, r), n).astype(np.float32)
    out = np.rint(members @ members.T).astype(np.int8)
    out.setflags(write=False)
    return out


def intersection_sizes(n: int, r: int) -> np.ndarray:
    """``|I & J|`` for all pairs of r-subsets, colex order (read-only, cached)."""
    if r < 0 or r > n:
        raise ValueError(f"need 0 <= r <= n, got n={n}, r={r}")
    return _intersections(n, r)


def inclusion_matrix(n: int, r: int, t: int) -> np.ndarray:
    """0/1 matrix ``Z[I, T] = [T subset of I]`` for r-subsets I, t-subsets T."""
    big = membership_matrix(colex_subsets(n, r), n).astype(np.int64)
    small = membership_matrix(colex_subsets(n, t), n).astype(np.int64)
    return (big @ small.T == t).astype(np.int64)


def assemble_d(n: int, r: int, ell: int) -> np.ndarray:
    _check_scheme(n, r)
    if not 0 <= ell <= r:
        raise ValueError(f"need 0 <= l <= r, got l={ell}")
    return (intersection_sizes(n, r) == ell).astype(np.int64)


def assemble_p(n: int, r: int, t: int) -> np.ndarray:
    """``P_t`` entrywise as ``C(|I & J|, t)``."""
    _check_scheme(n, r)
    if not 0 <= t <= r:
        raise ValueError(f"need 0 <= t <= r, got t={t}")
    table = np.array([binomial(s, t) for s in range(r + 1)], dtype=np.int64)
    return table[intersection_sizes(n, r)]


def assemble_p_rank_one(n: int, r: int, t: int) -> np.ndarray:
    """``P_t`` as the sum over t-sets T of ``v_T v_T^T`` with ``v_T(I) = [T subset of I]``."""
    _check_scheme(n, r)
    if not 0 <= t <= r:
        raise ValueError(f"need 0 <= t <= r, got t={t}")
    z = inclusion_matrix(n, r, t)
    return z @ z.T


def assemble(vec: SchemeVector) -> RatMatrix:
    """Exact dense matrix of a scheme vector."""
    d = vec.in_d()
    return RatMatrix.from_levels(intersection_sizes(d.n, d.r), d.coeffs)


# change of basis and spectra --------------------------------------------

def d_to_p(vec: SchemeVector) -> SchemeVector:
    """``sum_l a_l D_l = sum_t g_t P_t`` with ``g_t = sum_{l<=t} (-1)^{t-l} C(t,l) a_l``."""
    if vec.basis != "D":
        raise ValueError("expected a D-basis vector")
    a = vec.coeffs
    g = [sum(((-1) ** (t - l) * binomial(t, l) * a[l] for l in range(t + 1)), Fraction(0))
         for t in range(vec.r + 1)]
    return SchemeVector(vec.n, vec.r, "P", tuple(g))


def p_to_d(vec: SchemeVector) -> SchemeVector:
    """``sum_t g_t P_t = sum_l a_l D_l`` with ``a_l = sum_{t<=l} C(l,t) g_t``."""
    if vec.basis != "P":
        raise ValueError("expected a P-basis vector")
    g = vec.coeffs
    a = [sum((binomial(l, t) * g[t] for t in range(l + 1)), Fraction(0)) for l in range(vec.r + 1)]
    return SchemeVector(vec.n, vec.r, "D", tuple(a))


def p_eigenvalue(n: int, r: int, t: int, j: int) -> Fraction:
    """Eigenvalue of ``P_t`` on ``V_j``."""
    if j > t:
        return Fraction(0)
    return Fraction(binomial(n - t - j, r - t) * binomial(r - j, t - j))


def multiplicities(n: int, r: int) -> tuple[int, ...]:
    return tuple(binomial(n, j) - binomial(n, j - 1) for j in range(r + 1))


def scheme_spectrum(vec: SchemeVector) -> LevelSpectrum:
    p = vec.in_p()
    lams = tuple(
        sum((p.coeffs[t] * p_eigenvalue(p.n, p.r, t, j) for t in range(p.r + 1)), Fraction(0))
        for j in range(p.r + 1)
    )
    return LevelSpectrum(lams, multiplicities(p.n, p.r))


def q_upper_bound(vec: SchemeVector, j: int) -> Fraction:
    """Upper bound on the ``V_j`` eigenvalue of a nonnegative D-combination.

    Uses ``beta_t = sum_{l<=t} C(t,l) a_l`` in place of the signed P-coefficients.
    """
    if vec.basis != "D":
        raise ValueError("expected a D-basis vector")
    a = vec.coeffs
    if any(c < 0 for c in a):
        raise ValueError("q_upper_bound needs nonnegative D-coefficients")
    total = Fraction(0)
    for t in range(j, vec.r + 1):
        beta = sum((binomial(t, l) * a[l] for l in range(t + 1)), Fraction(0))
        total += beta * p_eigenvalue(vec.n, vec.r, t, j)
    return total


# expectation matrix -------------------------------------------------------

def expectation_coefficients(n: int, r: int, k: int) -> SchemeVector:
    """D-coefficients of ``E``: ``e_l = C(n-2r+l, l) C(k,2r-l)/C(2r,2r-l) 2^(-r^2-C(l,2))``."""
    _check_scheme(n, r)
    e = [
        Fraction(binomial(n - 2 * r + l, l) * binomial(k, 2 * r - l),
                 binomial(2 * r, 2 * r - l) * 2 ** (r * r + binomial(l, 2)))
        for l in range(r + 1)
    ]
    return SchemeVector(n, r, "D", tuple(e))


def e_p_coefficients(n: int, r: int, k: int) -> SchemeVector:
    return d_to_p(expectation_coefficients(n, r, k))


def e_min_eigenvalue(n: int, r: int, k: int) -> MinEigenvalue:
    """Minimum eigenvalue of ``E``.

    When every P-coefficient ``alpha_t`` is positive the minimum is ``alpha_r``
    (on ``V_r`` only ``P_r = I`` survives, and every other level adds positive
    terms).  Otherwise the exact minimum over levels is returned.
    """
    alphas = e_p_coefficients(n, r, k).coeffs
    all_positive = all(a > 0 for a in alphas)
    if all_positive:
        value = alphas[r]
    else:
        value = scheme_spectrum(SchemeVector(n, r, "P", alphas)).minimum
    condition = 2 * r <= k and k * 3 * r * 2 ** (r - 1) < n - 2 * r
    return MinEigenvalue(value=value, all_positive=all_positive,
                         condition_holds=condition, alphas=alphas)


def grigoriev_coefficients(n: int, r: int, k: int) -> SchemeVector:
    """D-coefficients of the complete-graph moment matrix on r-subsets.

    ``e_l = C(n-2r+l, l) C(k, 2r-l) / C(2r, 2r-l)`` (the entry at ``|I | J| = 2r - l``).
    """
    _check_scheme(n, r)
    e = [Fraction(binomial(n - 2 * r + l, l) * binomial(k, 2 * r - l), binomial(2 * r, 2 * r - l))
         for l in range(r + 1)]
    return SchemeVector(n, r, "D", tuple(e))


def knapsack_p_coefficients(n: int, r: int, k: int, e0: Fraction | int | None = None) -> SchemeVector:
    """Closed-form P-coefficients ``alpha_t = e_0 C(n-k, t) / C(k-2r+t, t)``.

    Valid for any D-vector proportional to ``grigoriev_coefficients`` (the
    scaling enters only through ``e0``); requires ``k >= 2r``.
    """
    _check_scheme(n, r)
    if k < 2 * r:
        raise ValueError("closed form needs k >= 2r")
    if e0 is None:
        e0 = grigoriev_coefficients(n, r, k).coeffs[0]
    e0 = Fraction(e0)
    alphas = [e0 * binomial(n - k, t) / binomial(k - 2 * r + t, t) for t in range(r + 1)]
    return SchemeVector(n, r, "P", tuple(alphas))
