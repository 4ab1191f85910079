"""Parameters ``(n, r, k)`` and the derived scalars ``beta``, ``alpha`` and ``p``."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from ..combinat import binomial

__all__ = ["CertificateParams", "DegenerateCertificateWarning"]


class DegenerateCertificateWarning(UserWarning):
    """Raised (as a warning) when ``k < 2r`` and ``beta(0)`` vanishes."""


@dataclass(frozen=True)
class CertificateParams:
    """Certificate of degree ``2r`` for planted-clique size ``k`` on ``n`` vertices.

    * ``beta(i) = C(k, 2r-i) / C(2r, 2r-i)``
    * ``alpha(i) = beta(i) C(n-2r+i, i) 2^(-r^2 - C(i,2))``
    * ``p(i) = 2^(-(r-i)^2)``, the chance that the cross edges of two r-sets
      meeting in i vertices are all present.
    """

    n: int
    r: int
    k: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if 2 * self.r > self.n:
            raise ValueError(f"need 2r <= n, got n={self.n}, r={self.r}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if self.k < 2 * self.r:
            warnings.warn(f"k={self.k} < 2r={2 * self.r}: beta(0) = 0, parts of the certificate vanish",
                          DegenerateCertificateWarning, stacklevel=3)

    def _check_level(self, i: int) -> None:
        if not 0 <= i <= self.r:
            raise ValueError(f"level i={i} outside 0..{self.r}")

    def beta(self, i: int) -> Fraction:
        self._check_level(i)
        m = 2 * self.r - i
        return Fraction(binomial(self.k, m), binomial(2 * self.r, m))

    def alpha(self, i: int) -> Fraction:
        self._check_level(i)
        r = self.r
        return self.beta(i) * binomial(self.n - 2 * r + i, i) / 2 ** (r * r + binomial(i, 2))

    def p(self, i: int) -> Fraction:
        self._check_level(i)
        return Fraction(1, 2 ** ((self.r - i) ** 2))

    @property
    def betas(self) -> list[Fraction]:
        return [self.beta(i) for i in range(self.r + 1)]

    @property
    def alphas(self) -> list[Fraction]:
        return [self.alpha(i) for i in range(self.r + 1)]

    def moment_factor(self, size: int) -> Fraction:
        """``C(k, s) / C(2r, s)``, the weight of a monomial of degree ``s``."""
        if not 0 <= size <= 2 * self.r:
            raise ValueError(f"monomial degree {size} outside 0..{2 * self.r}")
        return Fraction(binomial(self.k, size), binomial(2 * self.r, size))

    def as_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "k": self.k}
