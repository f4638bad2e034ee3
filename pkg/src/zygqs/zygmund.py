"""Zygmund-type functions and seminorm estimators.

The main object is the series

    g(x) = sum_{n>=1} R_{2n}(x) v_n(x),

which on the level-2m grid coincides with its m-th partial sum ``g_m`` (later
``R_{2n}`` vanish there by periodicity).  Grid values are exact; anywhere else
:meth:`ZygmundG.enclosure` returns a guaranteed interval built from the
geometric tail ``|R_{2n} v_n| <= 4**-2n (1+gamma)**n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .measure import RieszMeasure, odd_levels
from .quadic import (
    RHO_TABLE,
    Gamma,
    QuadicLike,
    QuadicRational,
    antideriv_R_scaled,
    int_dtype,
    rho_array,
)


class Enclosure(NamedTuple):
    lo: Fraction
    hi: Fraction
    mid: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi


def _floor_mul4(x: Fraction, n: int) -> tuple[int, Fraction]:
    """``(k, r)`` with ``x * 4**n = k + r``, ``0 <= r < 1``."""
    y = x * 4**n
    k = math.floor(y)
    return k, y - k


@dataclass(frozen=True)
class ZygmundG:
    gamma: Gamma
    tail_depth: int = 8

    def __post_init__(self):
        object.__setattr__(self, "gamma", Gamma.of(self.gamma))
        if self.tail_depth < 1:
            raise ValueError(f"tail_depth must be >= 1, got {self.tail_depth}")

    def partial_sum(self, x, m: int) -> Fraction:
        """``g_m(x)`` for any rational ``x``, exactly."""
        x = QuadicRational.of(x).value if not isinstance(x, Fraction) else x
        g = self.gamma.value
        total, v = Fraction(0), Fraction(1)
        for n in range(1, m + 1):
            k, _ = _floor_mul4(x, 2 * n - 1)
            v *= 1 + g * RHO_TABLE[k & 3]
            k, r = _floor_mul4(x, 2 * n)
            residue = k & 3
            if residue == 1:
                total += v * r / 4 ** (2 * n)
            elif residue == 2:
                total += v * (1 - r) / 4 ** (2 * n)
        return total

    def exact(self, x: QuadicLike, m: int | None = None) -> Fraction:
        """``g(x)`` at a 4-adic point; ``m`` must satisfy ``level(x) <= 2m``."""
        x = QuadicRational.of(x)
        need = (x.level + 1) // 2
        if m is None:
            m = max(need, 1)
        elif x.level > 2 * m:
            raise ValueError(
                f"point {x} has level {x.level} > 2m = {2 * m}; raise m to at least {need}"
            )
        return self.partial_sum(x.value, m)

    __call__ = exact

    def tail_bound(self, m: int) -> Fraction:
        r = (1 + self.gamma.value) / 16
        return r ** (m + 1) / (1 - r)

    def enclosure(self, x, tail_depth: int | None = None) -> Enclosure:
        """Interval certain to contain ``g(x)`` for any real (rational) ``x``."""
        m = self.tail_depth if tail_depth is None else tail_depth
        if isinstance(x, float):
            x = Fraction(x)
        elif not isinstance(x, Fraction):
            x = QuadicRational.of(x).value
        mid = self.partial_sum(x, m)
        w = self.tail_bound(m)
        return Enclosure(mid - w, mid + w, mid)

    def sup_bound(self) -> Fraction:
        """``sum_n 4**-2n (1+gamma)**n``, a bound for ``|g|``."""
        return self.tail_bound(0)

    # -- vectorized exact evaluation on grids ------------------------------------

    def grid_level(self, level: int) -> int:
        return 2 * ((level + 1) // 2)

    def scale(self, level: int) -> int:
        """Denominator of :meth:`scaled` at ``level`` (``q**m * 4**(2m)``)."""
        L = self.grid_level(level)
        return self.gamma.q ** (L // 2) * 4**L

    def scaled(self, j, level: int) -> np.ndarray:
        """``g(j / 4**level) * scale(level)`` as exact integers."""
        L = self.grid_level(level)
        m = L // 2
        p, q = self.gamma.p, self.gamma.q
        j = np.asarray(j)
        dtype = int_dtype(self.scale(level) * 4 * (int(np.max(np.abs(j), initial=0)) + 1))
        j = j.astype(dtype) << (2 * (L - level))
        total = np.zeros(j.shape, dtype=dtype)
        v = np.ones(j.shape, dtype=dtype)
        for n in range(1, m + 1):
            v = v * (q + p * rho_array(2 * n - 1, j, L)).astype(dtype)
            total = total + antideriv_R_scaled(2 * n, j, L).astype(dtype) * v * q ** (m - n)
        return total


@dataclass(frozen=True)
class Antiderivative:
    """``u(x) = mu([0, x))`` (signed), the canonical member of the class for ``mu``."""

    meas: RieszMeasure

    def __call__(self, x: QuadicLike) -> Fraction:
        return self.meas.cumulative(x)

    def scale(self, level: int) -> int:
        return self.meas.scale(level)

    def scaled(self, j, level: int) -> np.ndarray:
        return self.meas.cumulative_scaled(j, level)


# --- exemplar functions ----------------------------------------------------------


def _weierstrass(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    # 2**n * x is exact in binary floating point and fmod is exact, so each
    # term is accurate to an ulp; terms below 2**-52 are dropped.
    for n in range(53):
        out += 2.0**-n * np.cos(np.pi * np.fmod(np.abs(x) * 2.0**n, 2.0))
    return out


def _xlogx(x):
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(ax > 0, x * np.log(np.where(ax > 0, ax, 1.0)), 0.0)


_EXEMPLARS = {
    # kind: (function, in Lambda_*, graph is quasisymmetric, graph is a quasiline)
    "xlogx": (_xlogx, True, True, True),
    "weierstrass": (_weierstrass, True, True, True),
    "cuberoot": (np.cbrt, False, True, True),
    "sqrtplus": (lambda x: np.sqrt(np.maximum(np.asarray(x, dtype=np.float64), 0.0)), False, False, True),
    "exp": (np.exp, False, False, True),
    "identity": (lambda x: np.asarray(x, dtype=np.float64) * 1.0, True, True, True),
}


@dataclass(frozen=True)
class Exemplar:
    """Closed-form test functions.

    ``cuberoot`` has a quasisymmetric graph whose natural parametrization
    ``x + i x**(1/3)`` does not come from a reduced quasiconformal map;
    ``sqrtplus`` and ``exp`` have graphs that are quasilines but not
    quasisymmetric graphs.  ``in_zygmund`` refers to membership on bounded
    intervals.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in _EXEMPLARS:
            raise ValueError(f"unknown exemplar {self.kind!r}; choose from {sorted(_EXEMPLARS)}")

    def __call__(self, x):
        return _EXEMPLARS[self.kind][0](x)

    @property
    def in_zygmund(self) -> bool:
        return _EXEMPLARS[self.kind][1]

    @property
    def qs_graph(self) -> bool:
        return _EXEMPLARS[self.kind][2]

    @property
    def quasiline(self) -> bool:
        return _EXEMPLARS[self.kind][3]


EXEMPLAR_KINDS = tuple(_EXEMPLARS)


# --- sampling ---------------------------------------------------------------------


@dataclass(frozen=True)
class PairSamples:
    """Second-difference probes ``(x, h)`` with ``x = xs/4**level``, ``h = hs/4**level``."""

    xs: np.ndarray
    hs: np.ndarray
    level: int

    def __len__(self):
        return len(self.xs)

    def __getitem__(self, sl) -> "PairSamples":
        return PairSamples(self.xs[sl], self.hs[sl], self.level)

    def pair(self, i: int) -> tuple[Fraction, Fraction]:
        den = 4**self.level
        return Fraction(int(self.xs[i]), den), Fraction(int(self.hs[i]), den)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[QuadicLike, QuadicLike]]) -> "PairSamples":
        pairs = [(QuadicRational.of(x), QuadicRational.of(h)) for x, h in pairs]
        level = max([max(x.level, h.level) for x, h in pairs], default=0)
        xs = np.array([x.at_level(level) for x, _ in pairs], dtype=np.int64)
        hs = np.array([h.at_level(level) for _, h in pairs], dtype=np.int64)
        return cls(xs, hs, level)


def seminorm_samples(
    budget: int,
    seed: int = 0,
    window=(-1, 2),
    coarse_level: int = 6,
    fine_level: int = 12,
) -> PairSamples:
    """Exhaustive coarse probes followed by seeded random fine ones.

    The coarse part takes every ``x`` on the level-``coarse_level`` grid of the
    window with ``h = 4**-k``, ``k <= coarse_level``; random probes fill the
    budget with ``x`` on the level-``fine_level`` grid and log-uniform ``h``.
    """
    lo, hi = (QuadicRational.of(w) for w in window)
    shift = 2 * (fine_level - coarse_level)
    xc = np.arange(lo.at_level(coarse_level), hi.at_level(coarse_level) + 1, dtype=np.int64)
    hc = np.array([4 ** (coarse_level - k) for k in range(coarse_level + 1)], dtype=np.int64)
    X, H = np.meshgrid(xc, hc, indexing="ij")
    xs = [X.ravel() << shift]
    hs = [H.ravel() << shift]
    n_rand = max(budget - X.size, 0)
    if n_rand:
        rng = np.random.default_rng(seed)
        x_lo, x_hi = lo.at_level(fine_level), hi.at_level(fine_level)
        xs.append(rng.integers(x_lo, x_hi + 1, size=n_rand))
        ell = rng.integers(1, fine_level + 1, size=n_rand)
        base = 4 ** (fine_level - ell)
        hs.append(base + (rng.random(n_rand) * 3 * base).astype(np.int64))
    xs, hs = np.concatenate(xs), np.concatenate(hs)
    return PairSamples(xs[:budget], hs[:budget], fine_level)


# --- estimators --------------------------------------------------------------------


@dataclass(frozen=True)
class RatioReport:
    ratio: float
    exact: Fraction | None
    witness: tuple
    n_samples: int


def _values(f, pts: np.ndarray, level: int):
    """Exact scaled integers if ``f`` supports them, else a list of values."""
    if hasattr(f, "scaled"):
        return f.scaled(pts, level), f.scale(level)
    den = 4**level
    return [f(Fraction(int(p), den)) for p in pts], None


def second_difference_ratio(f, meas: RieszMeasure, samples) -> RatioReport:
    """``max |f(x+h) - 2f(x) + f(x-h)| / mu([x-h, x+h])`` over the samples.

    An empirical lower bound for the seminorm of ``f`` in the class defined
    by ``mu``.  Samples with zero measure are skipped.
    """
    if not isinstance(samples, PairSamples):
        samples = PairSamples.from_pairs(samples)
    xs, hs, L = samples.xs, samples.hs, samples.level
    if np.any(hs <= 0):
        raise ValueError("second differences need h > 0")
    fp, fd = _values(f, xs + hs, L)
    f0, _ = _values(f, xs, L)
    fm, _ = _values(f, xs - hs, L)
    Up = meas.cumulative_scaled(xs + hs, L)
    Um = meas.cumulative_scaled(xs - hs, L)
    mass = Up - Um
    if fd is not None:
        d2 = np.abs(fp - 2 * f0 + fm)
        # Both numerator and measure are scaled integers; the float ratio picks
        # the witness, the exact value is recomputed below.
        ratio = d2.astype(np.float64) / np.where(mass > 0, mass, 1).astype(np.float64)
        ratio *= meas.scale(L) / fd
    else:
        d2 = [abs(a - 2 * b + c) for a, b, c in zip(fp, f0, fm)]
        ratio = np.array(
            [float(Fraction(d) / Fraction(int(m), meas.scale(L))) if m > 0 else 0.0 for d, m in zip(d2, mass)]
        )
    ratio = np.where(mass > 0, ratio, -np.inf)
    if not np.any(np.isfinite(ratio)):
        return RatioReport(0.0, None, (), len(samples))
    i = int(np.argmax(ratio))
    if fd is not None:
        exact = Fraction(int(d2[i]), fd) / Fraction(int(mass[i]), meas.scale(L))
    else:
        exact = Fraction(d2[i]) / Fraction(int(mass[i]), meas.scale(L))
    return RatioReport(float(exact), exact, samples.pair(i), len(samples))


def classical_seminorm_estimate(f: Callable, xs, hs) -> RatioReport:
    """``max |f(x+h) - 2f(x) + f(x-h)| / (2h)`` over float probes."""
    xs = np.asarray(xs, dtype=np.float64)
    hs = np.asarray(hs, dtype=np.float64)
    if np.any(hs <= 0):
        raise ValueError("second differences need h > 0")
    d2 = np.abs(f(xs + hs) - 2 * f(xs) + f(xs - hs))
    ratio = d2 / (2 * hs)
    i = int(np.argmax(ratio))
    return RatioReport(float(ratio[i]), None, (float(xs[i]), float(hs[i])), len(xs))


def affine_deviation(f: Callable, a, b, grid: Sequence) -> Fraction | float:
    """``max |f(x) - f_ab(x)|`` over ``grid``, ``f_ab`` the chord through a, b."""
    if not a < b:
        raise ValueError(f"affine_deviation needs a < b, got {a}, {b}")
    fa, fb = f(a), f(b)
    best = 0
    for x in grid:
        if not a <= x <= b:
            raise ValueError(f"grid point {x} outside [{a}, {b}]")
        chord = ((b - x) * fa + (x - a) * fb) / (b - a)
        best = max(best, abs(f(x) - chord))
    return best
