"""Exact 4-adic arithmetic and the Rademacher-type system.

Points are kept as ``num / 4**level`` with unreduced numerators; cells are
``I(n, j) = [j / 4**n, (j + 1) / 4**n)``.  The step functions

    rho_n(x) = 0, 1, -1, 0   for x in I(n, j), j = 0, 1, 2, 3 (mod 4)

together with their antiderivatives ``R_n`` and the partial products
``v_m = prod_{k<=m} (1 + gamma * rho_{2k-1})`` are evaluated exactly, either
on single points (returning :class:`fractions.Fraction`) or vectorized over
integer numpy arrays of grid indices (returning scaled integers).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Union

import numpy as np

RHO_TABLE = (0, 1, -1, 0)
_RHO_ARRAY = np.array(RHO_TABLE, dtype=np.int64)

# Largest magnitude we let int64 arrays carry before switching to object dtype.
INT64_SAFE = 2**62


@total_ordering
class QuadicRational:
    """The exact number ``num / 4**level``.

    Equality, ordering and hashing compare values, so ``QuadicRational(4, 1)``
    equals ``QuadicRational(1, 0)``.
    """

    __slots__ = ("num", "level")

    def __init__(self, num: int, level: int = 0):
        if level < 0:
            raise ValueError(f"level must be nonnegative, got {level}")
        self.num = int(num)
        self.level = int(level)

    @classmethod
    def of(cls, x: "QuadicLike") -> "QuadicRational":
        """Coerce ints, Fractions, floats, ``"p/q"`` strings and 4-adic values."""
        if isinstance(x, QuadicRational):
            return x
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, float):
            x = Fraction(x)
        if isinstance(x, (int, np.integer)):
            return cls(int(x), 0)
        if isinstance(x, Rational):
            num, den = int(x.numerator), int(x.denominator)
            if den & (den - 1):
                raise ValueError(f"{x} is not a 4-adic rational")
            k = den.bit_length() - 1
            if k % 2:
                num, k = num * 2, k + 1
            return cls(num, k // 2)
        raise TypeError(f"cannot build a QuadicRational from {type(x).__name__}")

    def at_level(self, level: int) -> int:
        """Numerator over ``4**level``; requires ``level >= self.level``."""
        if level < self.level:
            raise ValueError(f"cannot express level-{self.level} point at level {level}")
        return self.num << (2 * (level - self.level))

    def normalized(self) -> "QuadicRational":
        num, level = self.num, self.level
        while level > 0 and num % 4 == 0:
            num //= 4
            level -= 1
        return QuadicRational(num, level)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, 4**self.level)

    def _pair(self, other):
        other = QuadicRational.of(other)
        level = max(self.level, other.level)
        return self.at_level(level), other.at_level(level), level

    def __add__(self, other):
        a, b, level = self._pair(other)
        return QuadicRational(a + b, level)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, level = self._pair(other)
        return QuadicRational(a - b, level)

    def __rsub__(self, other):
        a, b, level = self._pair(other)
        return QuadicRational(b - a, level)

    def __neg__(self):
        return QuadicRational(-self.num, self.level)

    def __eq__(self, other):
        try:
            a, b, _ = self._pair(other)
        except (TypeError, ValueError):
            return NotImplemented
        return a == b

    def __lt__(self, other):
        a, b, _ = self._pair(other)
        return a < b

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"QuadicRational({self.num}, {self.level})"

    def __str__(self):
        return str(self.value)


QuadicLike = Union[QuadicRational, int, Fraction, float, str]


@dataclass(frozen=True)
class QuadicInterval:
    """The half-open cell ``I(level, index) = [index/4**level, (index+1)/4**level)``."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"level must be nonnegative, got {self.level}")

    @property
    def left(self) -> QuadicRational:
        return QuadicRational(self.index, self.level)

    @property
    def right(self) -> QuadicRational:
        return QuadicRational(self.index + 1, self.level)

    @property
    def length(self) -> Fraction:
        return Fraction(1, 4**self.level)

    def split(self) -> tuple["QuadicInterval", ...]:
        return tuple(QuadicInterval(self.level + 1, 4 * self.index + d) for d in range(4))

    def contains(self, x: QuadicLike) -> bool:
        return self.left <= QuadicRational.of(x) < self.right

    def __str__(self):
        return f"I({self.level},{self.index})"


@dataclass(frozen=True)
class Gamma:
    """Rational parameter ``p/q`` of the product weights, ``0 <= p/q < 1``."""

    p: int
    q: int = 1

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError(f"denominator must be positive, got {self.q}")
        if not 0 <= self.p < self.q:
            raise ValueError(f"gamma must satisfy 0 <= gamma < 1, got {self.p}/{self.q}")
        g = Fraction(self.p, self.q)
        object.__setattr__(self, "p", g.numerator)
        object.__setattr__(self, "q", g.denominator)

    @classmethod
    def of(cls, x) -> "Gamma":
        if isinstance(x, Gamma):
            return x
        f = Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10**9)
        return cls(f.numerator, f.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self):
        return f"{self.p}/{self.q}"


def _cell_index(n: int, x: QuadicRational) -> int:
    # floor(x * 4**n); Python's >> floors for negative numerators.
    if x.level <= n:
        return x.num << (2 * (n - x.level))
    return x.num >> (2 * (x.level - n))


def rho(n: int, x: QuadicLike) -> int:
    """Value of the Rademacher-type step function ``rho_n`` at ``x``."""
    if n < 1:
        raise ValueError(f"rho_n needs n >= 1, got {n}")
    return RHO_TABLE[_cell_index(n, QuadicRational.of(x)) & 3]


def antideriv_R(n: int, x: QuadicLike) -> Fraction:
    """``R_n(x) = integral of rho_n over [0, x]``, exactly."""
    if n < 1:
        raise ValueError(f"R_n needs n >= 1, got {n}")
    x = QuadicRational.of(x)
    level = max(x.level, n)
    j = x.at_level(level)
    shift = 2 * (level - n)
    k = j >> shift
    r = j & ((1 << shift) - 1)
    residue = k & 3
    if residue == 1:
        return Fraction(r, 4**level)
    if residue == 2:
        return Fraction((1 << shift) - r, 4**level)
    return Fraction(0)


def weight_factors(m: int, gamma: Gamma, x: QuadicLike) -> list[Fraction]:
    gamma = Gamma.of(gamma)
    g = gamma.value
    return [1 + g * rho(2 * k - 1, x) for k in range(1, m + 1)]


def weight_v(m: int, gamma: Gamma, x: QuadicLike) -> Fraction:
    """Partial product ``v_m(x)``."""
    if m < 1:
        raise ValueError(f"v_m needs m >= 1, got {m}")
    out = Fraction(1)
    for f in weight_factors(m, gamma, x):
        out *= f
    return out


def max_weight(m: int, gamma: Gamma, x: QuadicLike) -> Fraction:
    """Pointwise maximum ``max(v_1, ..., v_m)`` at ``x``."""
    if m < 1:
        raise ValueError(f"v_m* needs m >= 1, got {m}")
    best, cur = None, Fraction(1)
    for f in weight_factors(m, gamma, x):
        cur *= f
        best = cur if best is None or cur > best else best
    return best


# --- vectorized kernels on integer grid indices -------------------------------
#
# A grid index array ``j`` at level ``L`` stands for the points j / 4**L.


def int_dtype(bound: int):
    """int64 when every intermediate stays below ``bound``; object otherwise."""
    return np.int64 if bound < INT64_SAFE else object


def as_index_array(j, dtype=np.int64) -> np.ndarray:
    return np.asarray(j, dtype=dtype)


def cell_index_array(n: int, j: np.ndarray, level: int) -> np.ndarray:
    if level <= n:
        return j << (2 * (n - level))
    return j >> (2 * (level - n))


def rho_array(n: int, j: np.ndarray, level: int) -> np.ndarray:
    """``rho_n`` at the points ``j / 4**level`` (int64 result)."""
    k = cell_index_array(n, j, level)
    return _RHO_ARRAY[np.asarray(k & 3, dtype=np.int64)]


def antideriv_R_scaled(n: int, j: np.ndarray, level: int) -> np.ndarray:
    """``R_n(j / 4**level) * 4**level`` as integers; requires ``level >= n``."""
    if level < n:
        raise ValueError("antideriv_R_scaled needs level >= n")
    shift = 2 * (level - n)
    k = j >> shift
    r = j & ((1 << shift) - 1)
    residue = np.asarray(k & 3, dtype=np.int64)
    full = 1 << shift
    return np.where(residue == 1, r, np.where(residue == 2, full - r, 0))


def weight_v_scaled(m: int, gamma: Gamma, j: np.ndarray, level: int) -> np.ndarray:
    """``v_m(j / 4**level) * q**m`` as integers, where ``gamma = p/q``."""
    out = np.ones(np.shape(j), dtype=j.dtype if j.dtype == object else np.int64)
    for k in range(1, m + 1):
        out = out * (gamma.q + gamma.p * rho_array(2 * k - 1, j, level))
    return out
