"""Generalized variation: gauges, partition sums, and the 4-adic series of g.

``S_m`` is the absolute-increment sum of ``g`` over the uniform level-2m
partition of [0, 1], accumulated in exact scaled integers, and ``V_m`` the
matching gauge sum.  ``M_m = int_0^1 max(v_1..v_m)`` is computed exactly by
a dynamic program over the digits that drive the weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ._parallel import chunk_ranges, map_chunks
from .quadic import Gamma
from .zygmund import ZygmundG

M_MAX_DEFAULT = 6
M_MAX_SLOW = 8
CHUNK = 1 << 20


@dataclass(frozen=True)
class Gauge:
    """``Phi_q(t) = t / log(1/t)**q`` below ``t_star``, tangent line above it."""

    q: float
    t_star: float = math.exp(-1.0)

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError(f"gauge exponent must be positive, got {self.q}")
        if not 0 < self.t_star < 1:
            raise ValueError(f"t_star must lie in (0, 1), got {self.t_star}")

    @property
    def _knot(self) -> tuple[float, float]:
        ell = -math.log(self.t_star)
        value = self.t_star * ell ** -self.q
        slope = ell ** -self.q + self.q * ell ** (-self.q - 1)
        return value, slope

    def derivative(self, t):
        t = np.asarray(t, dtype=np.float64)
        _, slope = self._knot
        small = (t > 0) & (t <= self.t_star)
        ts = np.where(small, t, 0.5)
        ell = -np.log(ts)
        d = ell ** -self.q + self.q * ell ** (-self.q - 1)
        return np.where(small, d, np.where(t > self.t_star, slope, 0.0))

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < 0):
            raise ValueError("gauge is defined for t >= 0")
        value, slope = self._knot
        small = (t > 0) & (t <= self.t_star)
        ts = np.where(small, t, 0.5)
        out = np.where(small, ts * (-np.log(ts)) ** -self.q, 0.0)
        out = np.where(t > self.t_star, value + slope * (t - self.t_star), out)
        return out if out.ndim else float(out)


def phi(gauge: Gauge, t):
    return gauge(t)


def phi_variation(gauge: Callable, f: Callable, partition: Sequence) -> float:
    """``sum_j Phi(|f(x_j) - f(x_{j-1})|)`` over one partition."""
    pts = list(partition)
    if len(pts) < 2:
        raise ValueError("a partition needs at least two points")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("partition points must be strictly increasing")
    vals = [f(x) for x in pts]
    incs = np.array([float(abs(b - a)) for a, b in zip(vals, vals[1:])])
    return math.fsum(np.atleast_1d(gauge(incs)))


# --- the 4-adic series of g ---------------------------------------------------------


@dataclass(frozen=True)
class SeriesRow:
    m: int
    S: Fraction
    V: dict
    maxint: Fraction


def _increment_chunk(zg: ZygmundG, L: int, gauges: Sequence[Gauge], bounds: tuple[int, int]):
    a, b = bounds
    G = zg.scaled(np.arange(a, b + 1, dtype=np.int64), L)
    d = np.abs(np.diff(G))
    t = d.astype(np.float64) / zg.scale(L)
    return int(d.sum()), [float(np.sum(gauge(t))) for gauge in gauges]


def increment_sums(zg: ZygmundG, m: int, gauges: Sequence[Gauge] = ()) -> tuple[Fraction, list[float]]:
    """Exact ``S_m`` and gauge sums over the uniform level-2m partition of [0, 1].

    Chunks are fixed-size, so the integer total and the float reduction tree
    do not depend on the worker count.
    """
    L = 2 * m
    n = 4**L
    parts = map_chunks(lambda c: _increment_chunk(zg, L, gauges, c), chunk_ranges(0, n, CHUNK))
    S = Fraction(sum(p[0] for p in parts), zg.scale(L))
    V = [math.fsum(p[1][i] for p in parts) for i in range(len(gauges))]
    return S, V


def quadic_variation_series(
    zg: ZygmundG, q: float | Iterable[float], m_max: int, slow: bool = False
) -> list[SeriesRow]:
    """Rows ``(m, S_m, {q: V_m}, M_m)`` for ``m = 1..m_max``."""
    limit = M_MAX_SLOW if slow else M_MAX_DEFAULT
    if not 1 <= m_max <= limit:
        hint = " (pass slow=True for m_max up to 8)" if m_max <= M_MAX_SLOW and not slow else ""
        raise ValueError(f"m_max must lie in [1, {limit}], got {m_max}{hint}")
    qs = [float(q)] if np.isscalar(q) else [float(x) for x in q]
    gauges = [Gauge(x) for x in qs]
    rows = []
    for m in range(1, m_max + 1):
        S, V = increment_sums(zg, m, gauges)
        rows.append(SeriesRow(m, S, dict(zip(qs, V)), max_weight_integral(zg.gamma, m, slow=True)))
    return rows


# --- maximal weight integral ----------------------------------------------------------


def max_weight_integral(gamma, m: int, slow: bool = False) -> Fraction:
    """Exact ``int_0^1 max(v_1, ..., v_m) dx``.

    On [0, 1) the odd-level digits are independent and uniform, so the
    integral is an expectation over the factor sequence; the dynamic program
    tracks ``(current product, running max)`` with exact probabilities.
    """
    limit = M_MAX_SLOW if slow else M_MAX_DEFAULT
    if not 1 <= m <= limit:
        raise ValueError(f"m must lie in [1, {limit}], got {m}")
    g = Gamma.of(gamma).value
    # rho takes 0 with probability 1/2 and +-1 with probability 1/4 each.
    steps = ((1 + g, Fraction(1, 4)), (Fraction(1), Fraction(1, 2)), (1 - g, Fraction(1, 4)))
    states = {(Fraction(1), None): Fraction(1)}
    for _ in range(m):
        nxt: dict = {}
        for (cur, best), prob in states.items():
            for factor, pf in steps:
                c = cur * factor
                b = c if best is None or c > best else best
                key = (c, b)
                nxt[key] = nxt.get(key, 0) + prob * pf
        states = nxt
    return sum((best * prob for (_, best), prob in states.items()), Fraction(0))


# --- log-power fits ------------------------------------------------------------------


@dataclass(frozen=True)
class PowerFit:
    C: float
    p: float
    residual: float


def log_power_fit(series: Iterable[tuple[float, float]]) -> PowerFit:
    """Least-squares fit of ``sigma ~ C * log(N+1)**p`` in log-log coordinates."""
    data = [(float(N), float(s)) for N, s in series]
    if len(data) < 3:
        raise ValueError("log_power_fit needs at least 3 points")
    if len({N for N, _ in data}) < 2:
        raise ValueError("log_power_fit needs at least two distinct N")
    if any(s <= 0 for _, s in data) or any(N <= 0 for N, _ in data):
        raise ValueError("log_power_fit needs positive N and sums")
    X = np.log(np.log1p([N for N, _ in data]))
    Y = np.log([s for _, s in data])
    A = np.vstack([X, np.ones_like(X)]).T
    (p, logC), res, *_ = np.linalg.lstsq(A, Y, rcond=None)
    residual = float(np.sqrt(np.mean((A @ np.array([p, logC]) - Y) ** 2)))
    return PowerFit(float(math.exp(logC)), float(p), residual)


def uniform_variation(f: Callable, N: int, a: float = 0.0, b: float = 1.0) -> float:
    """``sum |f(x_j) - f(x_{j-1})|`` over the uniform N-partition of [a, b]."""
    x = a + (b - a) * np.arange(N + 1) / N
    return math.fsum(np.abs(np.diff(f(x))))


# --- three-point inequalities ----------------------------------------------------------


@dataclass(frozen=True)
class ThreePointReport:
    C: float
    witness: tuple
    n_triples: int


def random_triples(n: int, seed: int = 0, window=(0.1, 0.9), decades: float = 4.0) -> np.ndarray:
    """Triples ``a < x < b`` in ``window``: log-uniform ``b - a``, uniform position of ``x``.

    Blocks of 1000 are seeded by ``(seed, block)``, so a larger ``n`` extends a smaller one.
    """
    lo, hi = window
    blocks = []
    for k in range(-(-n // 1000)):
        rng = np.random.default_rng([seed, k])
        ln = (hi - lo) * 10.0 ** -rng.uniform(0, decades, 1000)
        a = lo + rng.random(1000) * (hi - lo - ln)
        x = a + rng.uniform(0.0, 1.0, 1000) * ln
        blocks.append(np.stack([a, x, a + ln], axis=1))
    out = np.concatenate(blocks)[:n]
    return out[(out[:, 0] < out[:, 1]) & (out[:, 1] < out[:, 2])]


def quadratic_three_point_constant(f: Callable, triples: np.ndarray) -> ThreePointReport:
    """Smallest ``C`` with ``(f(x)-f(a))^2/(x-a) + (f(b)-f(x))^2/(b-x) <= (f(b)-f(a))^2/(b-a) + C(b-a)``."""
    a, x, b = np.asarray(triples, dtype=np.float64).T
    fa, fx, fb = f(a), f(x), f(b)
    lhs = (fx - fa) ** 2 / (x - a) + (fb - fx) ** 2 / (b - x)
    c = (lhs - (fb - fa) ** 2 / (b - a)) / (b - a)
    i = int(np.argmax(c))
    return ThreePointReport(float(c[i]), (float(a[i]), float(x[i]), float(b[i])), len(c))


def telescoping_constant(f, meas, triples: np.ndarray, level: int) -> ThreePointReport:
    """Exact max of ``(|f(x)-f(a)| + |f(b)-f(x)| - |f(b)-f(a)|) / mu([a, b])``.

    ``triples`` holds grid indices ``a < x < b`` at ``level``; ``f`` must offer
    ``scaled``/``scale`` (e.g. :class:`~zygqs.zygmund.ZygmundG`).
    """
    t = np.asarray(triples)
    if np.any(~((t[:, 0] < t[:, 1]) & (t[:, 1] < t[:, 2]))):
        raise ValueError("triples must satisfy a < x < b")
    G = f.scaled(t, level)
    U = meas.cumulative_scaled(t, level)
    ex = np.abs(G[:, 1] - G[:, 0]) + np.abs(G[:, 2] - G[:, 1]) - np.abs(G[:, 2] - G[:, 0])
    mass = U[:, 2] - U[:, 0]
    approx = ex.astype(np.float64) / mass.astype(np.float64)
    i = int(np.argmax(approx))
    exact = Fraction(int(ex[i]), f.scale(level)) / Fraction(int(mass[i]), meas.scale(level))
    den = 4**level
    return ThreePointReport(float(exact), tuple(Fraction(int(v), den) for v in t[i]), len(t))
