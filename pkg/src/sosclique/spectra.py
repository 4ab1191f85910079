"""Symmetric eigen-analysis: spectra, PSD verdicts, spectral norms and ranks.

Matrices are scaled by ``1 / max|entry|`` before any floating-point work, and
every report carries that ``scale`` so values can be mapped back.  The
default solver is a cyclic Jacobi iteration using the round-robin parallel
ordering (each round rotates ``dim / 2`` disjoint pivot pairs at once, so a
round is a handful of vectorized row/column updates).  Above
``JACOBI_MAX_DIM`` the LAPACK symmetric solver is used instead unless the
caller asks for Jacobi explicitly.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .graphs import Graph
from .ratmat import RatMatrix

__all__ = [
    "JACOBI_MAX_DIM",
    "SpectrumReport",
    "normalized",
    "jacobi_eigenvalues",
    "eigenvalues_symmetric",
    "is_psd",
    "spectral_norm",
    "numerical_rank",
    "clique_indices",
    "clique_principal_submatrix",
]

#: Largest dimension solved by Jacobi when ``method="auto"``.
JACOBI_MAX_DIM = 256

_SYM_TOL = 1e-12
_OFF_TOL = 1e-14


@dataclass
class SpectrumReport:
    """Eigenvalues of ``A / scale`` in ascending order.

    ``psd`` holds iff ``min >= -tolerance * max(1, |max|)``; multiply by
    ``scale`` to recover eigenvalues of the original matrix.
    """

    dimension: int
    min: float
    max: float
    scale: float
    psd: bool
    tolerance: float
    eigenvalues: np.ndarray | None = None
    method: str = "jacobi"
    sweeps: int = 0

    @property
    def true_min(self) -> float:
        return self.min * self.scale

    @property
    def true_max(self) -> float:
        return self.max * self.scale

    def true_eigenvalues(self) -> np.ndarray:
        if self.eigenvalues is None:
            raise ValueError("report was built without the eigenvalue list")
        return self.eigenvalues * self.scale

    def to_dict(self, include_eigenvalues: bool = False) -> dict:
        out = {
            "dimension": self.dimension,
            "min": self.min,
            "max": self.max,
            "psd": self.psd,
            "tolerance": self.tolerance,
            "scale": self.scale,
        }
        if include_eigenvalues and self.eigenvalues is not None:
            out["eigenvalues"] = [float(x) for x in self.eigenvalues]
        return out

    def to_json(self, include_eigenvalues: bool = False) -> str:
        return json.dumps(self.to_dict(include_eigenvalues), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumReport":
        eig = data.get("eigenvalues")
        return cls(
            dimension=int(data["dimension"]),
            min=float(data["min"]),
            max=float(data["max"]),
            scale=float(data["scale"]),
            psd=bool(data["psd"]),
            tolerance=float(data["tolerance"]),
            eigenvalues=None if eig is None else np.asarray(eig, dtype=float),
        )


def normalized(matrix) -> tuple[np.ndarray, float]:
    """``(A / max|A|, max|A|)`` as floats; exact inputs are divided before rounding."""
    if isinstance(matrix, RatMatrix):
        num = matrix.num
        if num.size == 0:
            return np.zeros(num.shape), 1.0
        if num.dtype == object:
            peak = max(abs(int(x)) for x in num.ravel())
            if peak == 0:
                return np.zeros(num.shape), 1.0
            flat = [float(Fraction(int(x), peak)) for x in num.ravel()]
            return np.array(flat).reshape(num.shape), float(Fraction(peak, matrix.den))
        peak = int(np.abs(num).max())
        if peak == 0:
            return np.zeros(num.shape), 1.0
        return num.astype(np.float64) / float(peak), float(Fraction(peak, matrix.den))
    arr = np.asarray(matrix, dtype=np.float64)
    peak = float(np.abs(arr).max()) if arr.size else 0.0
    if peak == 0.0:
        return np.zeros(arr.shape), 1.0
    return arr / peak, peak


def _check_symmetric(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.abs(a - a.T).max() > _SYM_TOL * max(np.abs(a).max(), 1e-300):
        raise ValueError("matrix is not symmetric")


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint pairs covering every pair once (circle method)."""
    players = list(range(m)) + ([-1] if m % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        p, q = [], []
        for idx in range(size // 2):
            a, b = players[idx], players[size - 1 - idx]
            if a >= 0 and b >= 0:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=np.int64), np.array(q, dtype=np.int64)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_diagonal_norm(a: np.ndarray) -> float:
    # summed directly: subtracting the diagonal from ||A||_F cancels catastrophically
    diag = np.diag(a).copy()
    np.fill_diagonal(a, 0.0)
    out = float(np.linalg.norm(a))
    np.fill_diagonal(a, diag)
    return out


def jacobi_eigenvalues(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, int]:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi with parallel ordering.

    Iterates until the off-diagonal Frobenius mass drops below
    ``1e-14 * ||A||_F``.  Returns ``(ascending eigenvalues, sweeps used)``.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    m = a.shape[0]
    if m <= 1:
        return np.diag(a).copy(), 0
    total = np.linalg.norm(a)
    if total == 0.0:
        return np.zeros(m), 0
    rounds = _round_robin(m)
    target = _OFF_TOL * total
    for sweep in range(1, max_sweeps + 1):
        for p, q in rounds:
            apq = a[p, q]
            app, aqq = a[p, p], a[q, q]
            g = 100.0 * np.abs(apq)
            if sweep > 4:
                # below rounding level of both diagonal entries: drop it
                tiny = (np.abs(app) + g == np.abs(app)) & (np.abs(aqq) + g == np.abs(aqq))
                a[p[tiny], q[tiny]] = 0.0
                a[q[tiny], p[tiny]] = 0.0
                apq = np.where(tiny, 0.0, apq)
            active = apq != 0.0
            if not active.any():
                continue
            p, q, apq, g = p[active], q[active], apq[active], g[active]
            h = a[q, q] - a[p, p]
            large = np.abs(h) + g == np.abs(h)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                theta = 0.5 * h / apq
                t_std = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
                t = np.where(large, apq / np.where(h == 0, 1.0, h), t_std)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            cc, sc = c[:, None], s[:, None]
            a[p, :] = cc * row_p - sc * row_q
            a[q, :] = sc * row_p + cc * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
        if _off_diagonal_norm(a) < target:
            return np.sort(np.diag(a)), sweep
    raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")


def eigenvalues_symmetric(matrix, tol: float = 1e-9, method: str = "auto") -> SpectrumReport:
    """Full spectrum of a symmetric matrix (``ndarray`` or ``RatMatrix``).

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_DIM``).
    """
    a, scale = normalized(matrix)
    _check_symmetric(a)
    dim = a.shape[0]
    if method == "auto":
        method = "jacobi" if dim <= JACOBI_MAX_DIM else "lapack"
    sweeps = 0
    if method == "jacobi":
        lam, sweeps = jacobi_eigenvalues(a)
    elif method == "lapack":
        lam = np.linalg.eigvalsh((a + a.T) / 2) if dim else np.zeros(0)
    else:
        raise ValueError(f"unknown method {method!r}")
    lo = float(lam[0]) if dim else 0.0
    hi = float(lam[-1]) if dim else 0.0
    psd = lo >= -tol * max(1.0, abs(hi))
    return SpectrumReport(dimension=dim, min=lo, max=hi, scale=scale, psd=psd, tolerance=tol,
                          eigenvalues=lam, method=method, sweeps=sweeps)


def is_psd(matrix, rel_tol: float = 1e-9, method: str = "auto") -> SpectrumReport:
    return eigenvalues_symmetric(matrix, tol=rel_tol, method=method)


def _largest_magnitude(op, dim: int) -> float:
    v0 = np.random.Generator(np.random.PCG64(0)).standard_normal(dim)
    vals = eigsh(op, k=1, which="LM", v0=v0, return_eigenvectors=False, tol=0)
    return float(abs(vals[0]))


def spectral_norm(matrix, dense_limit: int = 512) -> float:
    """Largest singular value.

    Symmetric operands (including ``LinearOperator``s, which are assumed
    symmetric) use the largest-magnitude eigenvalue: dense LAPACK up to
    ``dense_limit``, Lanczos (ARPACK) above it.  Non-symmetric or rectangular
    inputs go through ``A^T A``.
    """
    if isinstance(matrix, LinearOperator):
        dim = matrix.shape[0]
        if dim <= 2:
            dense = matrix @ np.eye(dim)
            return float(np.abs(np.linalg.eigvalsh((dense + dense.T) / 2)).max())
        return _largest_magnitude(matrix, dim)
    a, scale = normalized(matrix)
    if a.size == 0:
        return 0.0
    square = a.ndim == 2 and a.shape[0] == a.shape[1]
    if square and np.abs(a - a.T).max() <= _SYM_TOL:
        sym = (a + a.T) / 2
        dim = a.shape[0]
        if dim <= dense_limit:
            return float(np.abs(np.linalg.eigvalsh(sym)).max()) * scale
        return _largest_magnitude(sym, dim) * scale
    gram = a.T @ a
    return float(np.sqrt(max(np.linalg.eigvalsh((gram + gram.T) / 2).max(), 0.0))) * scale


def numerical_rank(matrix, threshold: float | None = None, method: str = "auto") -> int:
    """Count of eigenvalues with ``|lambda| > threshold``.

    The default threshold is ``1e-8 * max|entry|``.  An explicit threshold is
    in the units of the original matrix.
    """
    report = eigenvalues_symmetric(matrix, method=method)
    lam = report.true_eigenvalues()
    cut = 1e-8 * report.scale if threshold is None else threshold
    return int(np.sum(np.abs(lam) > cut))


def clique_indices(graph: Graph, r: int) -> np.ndarray:
    """Colex positions of the r-subsets that are cliques."""
    from .certificate.moments import clique_rows
    from .combinat import colex_subsets

    return np.nonzero(clique_rows(graph, colex_subsets(graph.n, r)))[0]


def clique_principal_submatrix(matrix, graph: Graph, r: int):
    """Restrict an r-subset-indexed matrix to clique rows and columns (colex order kept)."""
    idx = clique_indices(graph, r)
    if isinstance(matrix, RatMatrix):
        return matrix.take(idx)
    return np.asarray(matrix)[np.ix_(idx, idx)]
