"""Closed-form tail and norm bounds, evaluated as plain floats.

Every evaluator returns a ``BoundReport``.  Its ``valid`` flag records
whether the side conditions of the underlying theorem hold.  It is an
annotation only, so evaluation never refuses inputs outside that range.
Logarithms are natural throughout.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .combinat import binomial
from .ratmat import RatMatrix

__all__ = [
    "BoundReport",
    "trace_method_bound",
    "trace_power",
    "r_a_norm_bound",
    "clique_count_threshold",
    "degree_threshold",
    "degree_center",
    "mcdiarmid_tail",
    "degree_mcdiarmid_check",
    "gershgorin_bound",
    "k_threshold",
    "l_norm_budget",
    "delta_norm_budget",
    "BOUNDS",
]


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    value: float
    valid: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "inputs": dict(self.inputs), "value": self.value, "valid": self.valid}
        if self.details:
            out["details"] = dict(self.details)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")


def trace_power(y: float, z: float, n: int, eps: float) -> int:
    """The trace power ``q = ceil(ln(n^z / eps) / (2y))`` behind ``trace_method_bound``."""
    return math.ceil((z * math.log(n) - math.log(eps)) / (2 * y))


def trace_method_bound(a: int, y: float, z: float, b: float, n: int, eps: float) -> BoundReport:
    """``(B / a!) (2 e a (ln(n^z/eps)/(2y) + 1))^y n^(a - y/2)``.

    Side conditions: ``n >= 10``, ``1 <= y <= 2a``, ``z >= 0``.
    """
    _check_eps(eps)
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    log_term = (z * math.log(n) - math.log(eps)) / (2 * y)
    value = b / math.factorial(a) * (2 * math.e * a * (log_term + 1)) ** y * n ** (a - y / 2)
    valid = n >= 10 and 1 <= y <= 2 * a and z >= 0
    return BoundReport("trace_method", {"a": a, "y": y, "z": z, "B": b, "n": n, "epsilon": eps},
                       value, valid, {"q": trace_power(y, z, n, eps)})


def r_a_norm_bound(a: int, n: int, eps: float) -> BoundReport:
    """``2^(a^2 + 2a + 2) ln(n/eps) n^(a - 1/2)``; valid for ``n >= 100``."""
    _check_eps(eps)
    value = 2.0 ** (a * a + 2 * a + 2) * math.log(n / eps) * n ** (a - 0.5)
    return BoundReport("r_a_norm", {"a": a, "n": n, "epsilon": eps}, value, n >= 100)


def clique_count_threshold(a: int, n: int, eps: float) -> BoundReport:
    """Deviation threshold ``ln(64/eps)^2 n^(a-1)`` for the a-clique count; valid for ``n >= 10``."""
    _check_eps(eps)
    value = math.log(64 / eps) ** 2 * float(n) ** (a - 1)
    mean = Fraction(binomial(n, a), 2 ** binomial(a, 2))
    return BoundReport("clique_count", {"a": a, "n": n, "epsilon": eps}, value, n >= 10,
                       {"mean": str(mean), "mean_float": float(mean)})


def degree_center(r: int, i: int, n: int) -> Fraction:
    """``E[deg_G(I) | I is a clique] = C(n-i, 2r-i) 2^(C(i,2) - C(2r,2))`` for ``|I| = i``."""
    return Fraction(binomial(n - i, 2 * r - i), 2 ** (binomial(2 * r, 2) - binomial(i, 2)))


def degree_threshold(r: int, i: int, n: int, eps: float) -> BoundReport:
    """Deviation threshold ``2 ln(128/eps)^2 n^(2r - i - 1/2)`` around ``degree_center``."""
    _check_eps(eps)
    if not 0 <= i <= 2 * r:
        raise ValueError(f"need 0 <= i <= 2r, got i={i}, r={r}")
    value = 2 * math.log(128 / eps) ** 2 * float(n) ** (2 * r - i - 0.5)
    center = degree_center(r, i, n)
    return BoundReport("degree", {"r": r, "i": i, "n": n, "epsilon": eps}, value, n >= 10,
                       {"center": str(center), "center_float": float(center)})


def mcdiarmid_tail(num_vars: int, c: float, t: float) -> BoundReport:
    """``min(1, 2 exp(-2 t^2 / (n c^2)))`` for bounded differences ``c`` over ``n`` variables."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if c <= 0:
        raise ValueError(f"c must be > 0, got {c}")
    value = min(1.0, 2.0 * math.exp(-2.0 * t * t / (num_vars * c * c)))
    return BoundReport("mcdiarmid", {"num_vars": num_vars, "c": c, "t": t}, value, True)


def degree_mcdiarmid_check(r: int, i: int, n: int, eps: float) -> BoundReport:
    """Tail at ``t = sqrt(ln(4/eps)) n^(2r-i-1/2)`` with ``c = n^(2r-i-1)`` over ``n - i`` vertices.

    ``valid`` reports whether the tail is at most ``eps / 2``.
    """
    _check_eps(eps)
    t = math.sqrt(math.log(4 / eps)) * float(n) ** (2 * r - i - 0.5)
    c = float(n) ** (2 * r - i - 1)
    tail = mcdiarmid_tail(n - i, c, t)
    return BoundReport("degree_mcdiarmid", {"r": r, "i": i, "n": n, "epsilon": eps}, tail.value,
                       tail.value <= eps / 2, {"t": t, "c": c})


def gershgorin_bound(matrix) -> float:
    """Maximum absolute row sum, an upper bound on the spectral norm."""
    if isinstance(matrix, RatMatrix):
        num = matrix.num
        if num.size == 0:
            return 0.0
        if num.dtype == object:
            best = max(sum(abs(int(x)) for x in row) for row in num)
        else:
            best = int(np.abs(num).sum(axis=1).max())
        return float(Fraction(best, matrix.den))
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return float(np.abs(arr).sum(axis=1).max()) if arr.size else 0.0


def k_threshold(n: float, r: int, c: float) -> float:
    """``2^(-c r) (sqrt(n) / ln n)^(1/r)``, the clique size below which PSD-ness is claimed."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if c < 0:
        raise ValueError(f"c must be >= 0, got {c}")
    return 2.0 ** (-c * r) * (math.sqrt(n) / math.log(n)) ** (1.0 / r)


def _budget(name: str, n: int, r: int, k: int, constant: float, valid: bool) -> BoundReport:
    value = 2.0 ** (constant * r * r) * float(k) ** (2 * r) * float(n) ** r * math.log(n) / math.sqrt(n)
    return BoundReport(name, {"n": n, "r": r, "k": k, "constant_c": constant}, value, valid,
                       {"normative": False})


def l_norm_budget(n: int, r: int, k: int, constant: float) -> BoundReport:
    """``2^(C r^2) k^(2r) n^r ln n / sqrt(n)`` with a caller-chosen ``C`` (non-normative)."""
    return _budget("l_norm_budget", n, r, k, constant, True)


def delta_norm_budget(n: int, r: int, k: int, constant: float) -> BoundReport:
    """Same shape as ``l_norm_budget``, for ``Delta``; flagged valid when ``n > C 2^(4 r^2)``."""
    return _budget("delta_norm_budget", n, r, k, constant, n > constant * 2.0 ** (4 * r * r))


#: Named evaluators reachable from the command line.
BOUNDS = {
    "trace": trace_method_bound,
    "r_a": r_a_norm_bound,
    "clique_count": clique_count_threshold,
    "degree": degree_threshold,
    "mcdiarmid": mcdiarmid_tail,
    "degree_mcdiarmid": degree_mcdiarmid_check,
    "k_threshold": k_threshold,
    "l_budget": l_norm_budget,
    "delta_budget": delta_norm_budget,
}
