"""Dense exact rational matrices stored as integer numerators over one denominator.

Entries are kept in int64 while every intermediate provably fits; anything
that could exceed ``2**62`` in magnitude is promoted to Python-int object
arrays, so results are exact either way.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = ["RatMatrix", "common_denominator", "scaled_numerators"]

_SAFE = 2**62


def common_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        den = math.lcm(den, Fraction(v).denominator)
    return den


def scaled_numerators(values: Sequence[Fraction], den: int) -> list[int]:
    """Integers ``v * den`` for values whose denominators divide ``den``."""
    out = []
    for v in values:
        v = Fraction(v)
        q, rem = divmod(v.numerator * den, v.denominator)
        if rem:
            raise ValueError(f"{v} is not a multiple of 1/{den}")
        out.append(q)
    return out


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.ravel())
    return int(np.abs(a).max())


def _as_exact(a: np.ndarray, bound: int) -> np.ndarray:
    """int64 if ``bound`` fits, else a Python-int object array."""
    if bound < _SAFE:
        return a.astype(np.int64) if a.dtype != np.int64 else a
    return a.astype(object)


def _mul_int(a: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return a
    bound = _max_abs(a) * abs(factor)
    return _as_exact(a, bound) * (factor if bound < _SAFE else int(factor))


class RatMatrix:
    """Exact rational matrix ``num / den`` with ``den > 0``.

    The representation is not canonical (``den`` need not be minimal);
    equality is exact value equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: int = 1):
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        num = np.asarray(num)
        if num.dtype.kind == "f":
            raise TypeError("RatMatrix numerators must be integers")
        if num.dtype != object and num.dtype != np.int64:
            num = num.astype(np.int64)
        self.num = num
        self.den = den

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, shape: tuple[int, ...]) -> "RatMatrix":
        return cls(np.zeros(shape, dtype=np.int64), 1)

    @classmethod
    def from_levels(cls, levels: np.ndarray, values: Sequence[Fraction],
                    multiplier: np.ndarray | None = None) -> "RatMatrix":
        """Entry ``values[levels[i, j]] * multiplier[i, j]``.

        ``levels`` is an integer array indexing into ``values``; negative
        levels give zero entries.
        """
        values = [Fraction(v) for v in values]
        den = common_denominator(values)
        nums = scaled_numerators(values, den)
        bound = max((abs(x) for x in nums), default=0)
        mbound = 1 if multiplier is None else max(_max_abs(np.asarray(multiplier)), 1)
        exact_dtype = np.int64 if bound * mbound < _SAFE else object
        table = np.array(nums + [0], dtype=exact_dtype)
        lv = np.asarray(levels)
        lv = np.where(lv < 0, len(nums), lv)
        out = table[lv]
        if multiplier is not None:
            mult = np.asarray(multiplier)
            out = out * (mult.astype(exact_dtype) if exact_dtype is object else mult.astype(np.int64))
        return cls(out, den)

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence[Fraction]] | np.ndarray) -> "RatMatrix":
        arr = np.array(rows, dtype=object)
        flat = [Fraction(x) for x in arr.ravel()]
        den = common_denominator(flat)
        nums = scaled_numerators(flat, den)
        bound = max((abs(x) for x in nums), default=0)
        num = np.array(nums, dtype=object).reshape(arr.shape)
        return cls(_as_exact(num, bound), den)

    @classmethod
    def from_int(cls, a: np.ndarray) -> "RatMatrix":
        return cls(np.asarray(a), 1)

    # basic protocol ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.num.shape

    def __repr__(self) -> str:
        return f"RatMatrix(shape={self.shape}, den={self.den})"

    def __getitem__(self, idx) -> Fraction | "RatMatrix":
        sub = self.num[idx]
        if np.ndim(sub) == 0:
            return Fraction(int(sub), self.den)
        return RatMatrix(sub, self.den)

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.num[i, j]), self.den)

    def to_fractions(self) -> np.ndarray:
        out = np.empty(self.shape, dtype=object)
        for idx, x in np.ndenumerate(self.num):
            out[idx] = Fraction(int(x), self.den)
        return out

    def to_float(self) -> np.ndarray:
        if self.num.dtype == object:
            return np.array([float(Fraction(int(x), self.den)) for x in self.num.ravel()],
                            dtype=float).reshape(self.shape)
        return self.num.astype(float) / self.den

    def max_abs(self) -> Fraction:
        return Fraction(_max_abs(self.num), self.den)

    def is_zero(self) -> bool:
        return not np.any(self.num != 0)

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(self.num.T, self.den)

    def take(self, rows: np.ndarray, cols: np.ndarray | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return RatMatrix(self.num[np.ix_(rows, cols)], self.den)

    def where(self, mask: np.ndarray) -> "RatMatrix":
        """Keep entries where ``mask`` is true, zero elsewhere."""
        return RatMatrix(np.where(mask, self.num, 0).astype(self.num.dtype), self.den)

    def reduced(self) -> "RatMatrix":
        """Same value with the smallest possible denominator."""
        g = self.den
        for x in np.unique(self.num) if self.num.dtype != object else set(self.num.ravel()):
            g = math.gcd(g, int(x))
            if g == 1:
                return self
        return RatMatrix(_div_exact(self.num, g), self.den // g)

    # arithmetic -------------------------------------------------------
    def _aligned(self, other: "RatMatrix") -> tuple[np.ndarray, np.ndarray, int]:
        den = math.lcm(self.den, other.den)
        return _mul_int(self.num, den // self.den), _mul_int(other.num, den // other.den), den

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        a, b, den = self._aligned(other)
        bound = _max_abs(a) + _max_abs(b)
        return RatMatrix(_as_exact(a, bound) + _as_exact(b, bound), den)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        a, b, den = self._aligned(other)
        bound = _max_abs(a) + _max_abs(b)
        return RatMatrix(_as_exact(a, bound) - _as_exact(b, bound), den)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(-self.num, self.den)

    def scale(self, factor: Fraction | int) -> "RatMatrix":
        f = Fraction(factor)
        return RatMatrix(_mul_int(self.num, f.numerator), self.den * f.denominator)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        a, b, _ = self._aligned(other)
        return bool(np.all(a == b))

    __hash__ = None  # type: ignore[assignment]

    def matmul_int(self, vecs: np.ndarray) -> "RatMatrix":
        """Exact product with an integer vector or matrix (right multiplication)."""
        v = np.asarray(vecs)
        inner = self.num.shape[1] if self.num.ndim == 2 else 1
        bound = _max_abs(self.num) * max(_max_abs(v), 1) * max(inner, 1)
        if bound < _SAFE and self.num.dtype != object:
            return RatMatrix(self.num @ v.astype(np.int64), self.den)
        return RatMatrix(self.num.astype(object) @ v.astype(object), self.den)

    def first_difference(self, other: "RatMatrix") -> tuple[int, ...] | None:
        """Index of the first entry where the two matrices differ, or None."""
        a, b, _ = self._aligned(other)
        diff = np.argwhere(a != b)
        return None if len(diff) == 0 else tuple(int(x) for x in diff[0])


def _div_exact(a: np.ndarray, g: int) -> np.ndarray:
    if a.dtype == object:
        return np.array([int(x) // g for x in a.ravel()], dtype=object).reshape(a.shape)
    return a // g
