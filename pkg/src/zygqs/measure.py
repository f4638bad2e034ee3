"""The Riesz-type product measure ``mu = weak* lim v_n dx``.

On a 4-adic cell of level ``l`` the factors ``1 + gamma*rho_k`` with
``k <= l`` are constant and the deeper ones average to 1, so

    mu(I(l, j)) = 4**-l * prod_{odd k <= l} (1 + gamma * rho_k(I(l, j)))

exactly.  Every quantity here is a :class:`fractions.Fraction` or a scaled
integer array; floats only appear in reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._parallel import chunk_ranges, map_chunks
from .quadic import (
    RHO_TABLE,
    Gamma,
    QuadicInterval,
    QuadicLike,
    QuadicRational,
    int_dtype,
)


def odd_levels(level: int) -> int:
    """Number of odd integers in ``1..level``."""
    return (max(level, 0) + 1) // 2


@dataclass(frozen=True)
class RieszMeasure:
    gamma: Gamma

    def __post_init__(self):
        object.__setattr__(self, "gamma", Gamma.of(self.gamma))

    # -- exact point evaluations ------------------------------------------------

    def cell_weight(self, I: QuadicInterval) -> Fraction:
        """Product of the factors that are constant on ``I``."""
        g = self.gamma.value
        out = Fraction(1)
        for k in range(1, I.level + 1, 2):
            out *= 1 + g * RHO_TABLE[(I.index >> (2 * (I.level - k))) & 3]
        return out

    def mu_quadic(self, I: QuadicInterval) -> Fraction:
        return self.cell_weight(I) / 4**I.level

    def cumulative(self, x: QuadicLike) -> Fraction:
        """Signed distribution function ``U(x) = mu([0, x))`` (negative for x < 0)."""
        x = QuadicRational.of(x)
        L = x.level
        whole = x.num >> (2 * L)
        frac = x.num & ((1 << (2 * L)) - 1)
        g = self.gamma.value
        total = Fraction(whole)
        weight = Fraction(1)
        for i in range(1, L + 1):
            d = (frac >> (2 * (L - i))) & 3
            scale = Fraction(1, 4**i)
            if i % 2:
                total += weight * scale * sum(1 + g * RHO_TABLE[e] for e in range(d))
                weight *= 1 + g * RHO_TABLE[d]
            else:
                total += weight * scale * d
        return total

    def mu_ab(self, a: QuadicLike, b: QuadicLike) -> Fraction:
        """``mu([a, b))``; rejects ``a > b``."""
        a, b = QuadicRational.of(a), QuadicRational.of(b)
        if a > b:
            raise ValueError(f"mu_ab needs a <= b, got a={a}, b={b}")
        return self.cumulative(b) - self.cumulative(a)

    # -- vectorized ---------------------------------------------------------------

    def scale(self, level: int) -> int:
        """Common denominator of :meth:`cumulative_scaled` at ``level``."""
        return self.gamma.q ** odd_levels(level) * 4**level

    def cumulative_scaled(self, j, level: int) -> np.ndarray:
        """``U(j / 4**level) * scale(level)`` as exact integers."""
        p, q = self.gamma.p, self.gamma.q
        K = odd_levels(level)
        D = self.scale(level)
        j = np.asarray(j)
        bound = D * (int(np.max(np.abs(j), initial=0)) // 4**level + 2) * (q + p) ** 2
        dtype = int_dtype(bound)
        j = j.astype(dtype)
        whole = j >> (2 * level)
        frac = j & ((1 << (2 * level)) - 1)
        prefix_odd = np.array([0, q, 2 * q + p, 3 * q], dtype=np.int64)
        factor_odd = np.array([q, q + p, q - p, q], dtype=np.int64)
        total = whole * D
        wnum = np.ones(j.shape, dtype=dtype)
        for i in range(1, level + 1):
            d = np.asarray((frac >> (2 * (level - i))) & 3, dtype=np.int64)
            mult = q ** (K - odd_levels(i)) * 4 ** (level - i)
            if i % 2:
                total = total + wnum * prefix_odd[d].astype(dtype) * mult
                wnum = wnum * factor_odd[d].astype(dtype)
            else:
                total = total + wnum * d.astype(dtype) * mult
        return total

    # -- audits -------------------------------------------------------------------

    def doubling_audit(self, depth: int, window=(-1, 2)) -> "DoublingReport":
        return doubling_audit(self, depth, window)

    def growth_envelope_check(self, gamma_prime, t_grid=None) -> "GrowthReport":
        return growth_envelope_check(self, gamma_prime, t_grid)


# --- doubling ------------------------------------------------------------------


@dataclass(frozen=True)
class DoublingReport:
    depth: int
    delta_hat: Fraction
    witness_I: tuple[Fraction, Fraction]
    witness_J: tuple[Fraction, Fraction]


def _ratios(U: np.ndarray, k: int):
    n = len(U) - 1
    left = U[k : n - k + 1] - U[: n - 2 * k + 1]
    right = U[2 * k :] - U[k : n - k + 1]
    return left, right


def _best_ratio_for_lengths(U: np.ndarray, ks: range, exhaustive: bool) -> list:
    """Per pair length: (float ratio, start, length, orientation, num, den) candidates.

    Float argmax is exact for integers below 2**25 (distinct ratios differ by
    more than an ulp); above that all near-ties are kept for exact comparison.
    """
    out = []
    for k in ks:
        left, right = _ratios(U, k)
        lf, rf = left.astype(np.float64), right.astype(np.float64)
        for o, fr in enumerate((lf / rf, rf / lf)):
            i = int(np.argmax(fr))
            num, den = (left, right) if o == 0 else (right, left)
            idx = np.nonzero(fr >= fr[i] * (1 - 1e-12))[0] if exhaustive else [i]
            for s in idx:
                out.append((float(fr[s]), int(s), k, o, int(num[s]), int(den[s])))
    return out


def doubling_audit(meas: RieszMeasure, depth: int, window=(-1, 2)) -> DoublingReport:
    """Exact max of ``mu(I)/mu(J) - 1`` over adjacent equal-length grid pairs.

    Endpoints range over the level-``depth`` grid inside ``window``; the result
    is a lower bound for the doubling constant.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    lo, hi = (QuadicRational.of(w) for w in window)
    if lo.level > depth or hi.level > depth:
        raise ValueError("window endpoints must lie on the audit grid")
    j0, j1 = lo.at_level(depth), hi.at_level(depth)
    U = meas.cumulative_scaled(np.arange(j0, j1 + 1), depth)
    n = j1 - j0
    exhaustive = int(U[-1] - U[0]) >= 2**25
    chunks = chunk_ranges(1, n // 2 + 1, 256)
    results = map_chunks(lambda r: _best_ratio_for_lengths(U, range(*r), exhaustive), chunks)
    cands = [c for part in results for c in part]
    top = max(c[0] for c in cands)
    best, best_c = None, None
    for ratio, s, k, o, a, b in cands:
        if ratio < top * (1 - 1e-12):
            continue
        val = Fraction(a, b)
        if best is None or val > best:
            best, best_c = val, (s, k, o)
    s, k, o = best_c
    den = 4**depth
    A = (Fraction(j0 + s, den), Fraction(j0 + s + k, den))
    B = (Fraction(j0 + s + k, den), Fraction(j0 + s + 2 * k, den))
    I, J = (A, B) if o == 0 else (B, A)
    return DoublingReport(depth, best - 1, I, J)


# --- growth envelope --------------------------------------------------------------


@dataclass
class GrowthReport:
    gamma_prime: float
    ok: bool
    min_slack: float
    witness_t: Fraction
    rows: list = field(default_factory=list)
    violations: list = field(default_factory=list)


def default_t_grid() -> list[Fraction]:
    """Level-4 points in (0, 4] plus powers 4**k, |k| <= 5."""
    pts = {Fraction(j, 4**4) for j in range(1, 4 * 4**4 + 1)}
    pts |= {Fraction(4) ** k for k in range(-5, 6)}
    return sorted(pts)


def growth_envelope_check(meas: RieszMeasure, gamma_prime, t_grid: Sequence | None = None) -> GrowthReport:
    """Check ``(1-g')t min(t,1/t)^g' <= mu~([-t,t]) <= (1+g')t max(t,1/t)^g'``.

    ``mu~`` is ``mu`` divided by ``mu([-1, 1])``.  Failing points are collected
    as witnesses instead of raising.
    """
    gp = float(gamma_prime)
    if not 0 < gp < 1:
        raise ValueError(f"gamma_prime must lie in (0, 1), got {gamma_prime}")
    ts = default_t_grid() if t_grid is None else [QuadicRational.of(t).value for t in t_grid]
    norm = meas.mu_ab(-1, 1)
    rows, violations = [], []
    min_slack, witness = math.inf, None
    for t in ts:
        if t <= 0:
            raise ValueError("growth grid points must be positive")
        val = meas.mu_ab(-t, t) / norm
        tf, vf = float(t), float(val)
        lower = (1 - gp) * tf * min(tf, 1 / tf) ** gp
        upper = (1 + gp) * tf * max(tf, 1 / tf) ** gp
        # Relative slack to the nearer envelope.
        slack = min(vf - lower, upper - vf) / tf
        rows.append((t, val, lower, upper, slack))
        if slack < 0:
            violations.append(t)
        if slack < min_slack:
            min_slack, witness = slack, t
    return GrowthReport(gp, not violations, min_slack, witness, rows, violations)
