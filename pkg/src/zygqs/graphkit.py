"""The graph ``Gamma(t) = u(t) + i v(t)`` with ``u' = mu`` and ``v = s_v * g``.

Samples live on the level-``depth`` grid of a 4-adic window and are stored as
exact integers over one common denominator; distances are formed from exact
integer differences and converted to floating point once.  The audits
(weak quasisymmetry constant, empirical eta-modulus, Ahlfors constant and
affine deviation) are maxima over sampled configurations, hence lower
bounds that can only grow with the budget: random configurations come in
fixed-size blocks seeded by ``(seed, block)``, so a larger budget always
contains the smaller one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from ._parallel import map_chunks
from .measure import RieszMeasure
from .quadic import QuadicLike, QuadicRational
from .zygmund import PairSamples, RatioReport, ZygmundG, second_difference_ratio

MAX_DEPTH = 6
BLOCK = 4096
COARSE_LEVEL = 2
LOG4_SPAN = 6  # ratios t = |x-a|/|x-b| are probed in [4**-6, 4**6]


@dataclass(frozen=True)
class GraphCurve:
    meas: RieszMeasure
    zg: ZygmundG
    v_scale: Fraction
    depth: int
    window: tuple[QuadicRational, QuadicRational]
    j0: int
    X: np.ndarray = field(repr=False)  # u * denom, exact integers
    Y: np.ndarray = field(repr=False)  # v * denom, exact integers
    denom: int

    def __len__(self) -> int:
        return len(self.X)

    def t(self, i) -> Fraction:
        """Parameter value of grid point ``i``."""
        return Fraction(self.j0 + int(i), 4**self.depth)

    def point(self, i) -> tuple[Fraction, Fraction]:
        """Exact ``(u, v)`` at grid point ``i``."""
        return Fraction(int(self.X[i]), self.denom), Fraction(int(self.Y[i]), self.denom)

    @cached_property
    def xf(self) -> np.ndarray:
        return self.X.astype(np.float64)

    def dist(self, i, k) -> np.ndarray:
        """``|Gamma(t_i) - Gamma(t_k)|`` from exact integer differences (in denom units)."""
        dx = (self.X[i] - self.X[k]).astype(np.float64)
        dy = (self.Y[i] - self.Y[k]).astype(np.float64)
        return np.hypot(dx, dy)

    def v_seminorm(self, samples: PairSamples) -> RatioReport:
        """Second-difference ratio of ``v = s_v g`` against ``mu``."""
        rep = second_difference_ratio(self.zg, self.meas, samples)
        exact = rep.exact * self.v_scale if rep.exact is not None else None
        return RatioReport(float(rep.ratio * self.v_scale), exact, rep.witness, rep.n_samples)


def build_graph(meas: RieszMeasure, zg: ZygmundG, v_scale, depth: int, window=(-1, 2)) -> GraphCurve:
    """Sample ``Gamma`` exactly at the level-``depth`` points of ``window``."""
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must lie in [1, {MAX_DEPTH}], got {depth}")
    if zg.gamma != meas.gamma:
        raise ValueError("measure and g must share gamma")
    s = Fraction(v_scale)
    if s < 0:
        raise ValueError("v_scale must be nonnegative")
    lo, hi = (QuadicRational.of(w) for w in window)
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    if lo.level > depth or hi.level > depth:
        raise ValueError("window endpoints must lie on the level-depth grid")
    j0, j1 = lo.at_level(depth), hi.at_level(depth)
    L = depth + depth % 2  # even level where both scales agree
    js = np.arange(j0, j1 + 1, dtype=np.int64) << (2 * (L - depth))
    D = meas.scale(L)
    assert D == zg.scale(L)
    U = meas.cumulative_scaled(js, L).astype(object)
    G = zg.scaled(js, L).astype(object)
    X = np.array([int(u) * s.denominator for u in U], dtype=object)
    Y = np.array([int(g) * s.numerator for g in G], dtype=object)
    denom = D * s.denominator
    bound = max(max(abs(int(x)) for x in X), max(abs(int(y)) for y in Y), 1)
    dtype = np.int64 if 4 * bound < 2**62 else object
    return GraphCurve(meas, zg, s, depth, (lo, hi), j0, X.astype(dtype), Y.astype(dtype), denom)


# --- triple sampling ---------------------------------------------------------------------


def _coarse_triples(curve: GraphCurve) -> np.ndarray:
    """All triples of distinct points on the level-2 sub-grid (as index arrays)."""
    step = 4 ** max(curve.depth - COARSE_LEVEL, 0)
    idx = np.arange(0, len(curve), step)
    x, a, b = np.meshgrid(idx, idx, idx, indexing="ij")
    keep = (x != a) & (x != b) & (a != b)
    return np.stack([x[keep], a[keep], b[keep]], axis=1)


def _random_block(curve: GraphCurve, seed: int, block: int) -> np.ndarray:
    """One block of random triples with log-uniform ratio ``|x-a| / |x-b|``."""
    rng = np.random.default_rng([seed, block])
    n = len(curve)
    x = rng.integers(0, n, BLOCK)
    db = np.floor(np.exp(rng.uniform(0, math.log(n), BLOCK))).astype(np.int64)
    t = 4.0 ** rng.uniform(-LOG4_SPAN, LOG4_SPAN, BLOCK)
    da = np.maximum(1, np.rint(t * db)).astype(np.int64)
    a = x + np.where(rng.random(BLOCK) < 0.5, -da, da)
    b = x + np.where(rng.random(BLOCK) < 0.5, -db, db)
    keep = (a >= 0) & (a < n) & (b >= 0) & (b < n) & (a != b)
    return np.stack([x[keep], a[keep], b[keep]], axis=1)


def sample_triples(curve: GraphCurve, budget: int, seed: int = 0) -> np.ndarray:
    """Coarse exhaustive triples followed by ``ceil(budget / BLOCK)`` random blocks."""
    blocks = map_chunks(lambda r: _random_block(curve, seed, r[0]), [(k, k + 1) for k in range(-(-budget // BLOCK))])
    return np.concatenate([_coarse_triples(curve), *blocks])


def triple_ratios(curve: GraphCurve, triples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(t, ratio)`` with ``t = |x-a|/|x-b|`` and ``ratio = |Gx-Ga| / |Gx-Gb|``."""
    x, a, b = triples.T
    t = np.abs(x - a) / np.abs(x - b)
    return t, curve.dist(x, a) / curve.dist(x, b)


def exact_ratio_sq(curve: GraphCurve, x: int, a: int, b: int) -> Fraction:
    """``(|Gx-Ga| / |Gx-Gb|)**2`` in exact arithmetic."""
    def d2(i, k):
        return (int(curve.X[i]) - int(curve.X[k])) ** 2 + (int(curve.Y[i]) - int(curve.Y[k])) ** 2

    return Fraction(d2(x, a), d2(x, b))


@dataclass(frozen=True)
class QSReport:
    H: float
    witness: tuple[Fraction, Fraction, Fraction]
    n_triples: int


def weak_qs_constant(curve: GraphCurve, triple_budget: int, seed: int = 0) -> QSReport:
    """Max of ``|Gx-Ga| / |Gx-Gb|`` over sampled triples with ``|x-a| <= |x-b|``."""
    tr = sample_triples(curve, triple_budget, seed)
    t, r = triple_ratios(curve, tr)
    ok = t <= 1
    tr, r = tr[ok], r[ok]
    i = int(np.argmax(r))
    return QSReport(float(r[i]), tuple(curve.t(k) for k in tr[i]), len(r))


@dataclass
class EtaReport:
    edges: np.ndarray
    eta_raw: np.ndarray  # nan for empty bins
    eta: np.ndarray  # running max of the populated bins
    counts: np.ndarray
    s_hat: float
    eta_at_one: float
    raw_violations: int


def s_grid() -> np.ndarray:
    """Candidate values of ``s``: 0 and 20 log-steps per decade in [1e-6, 1e3]."""
    return np.concatenate([[0.0], 10.0 ** (np.arange(-120, 61) / 20)])


def eta_modulus(curve: GraphCurve, t_bins: int = 4, triple_budget: int = 20000, seed: int = 0) -> EtaReport:
    """Binned empirical modulus; ``t_bins`` bins per factor of 4, right-closed, 1 an edge.

    ``s_hat`` is the least grid value of ``s`` with ``ratio <= t + s`` for every
    sampled triple with ``t <= 1/s``.
    """
    if t_bins < 1:
        raise ValueError("t_bins must be positive")
    tr = sample_triples(curve, triple_budget, seed)
    t, r = triple_ratios(curve, tr)
    edges = 4.0 ** (np.arange(-LOG4_SPAN * t_bins, LOG4_SPAN * t_bins + 1) / t_bins)
    which = np.searchsorted(edges, t, side="left")  # bin k is (edges[k-1], edges[k]]
    nb = len(edges) - 1
    raw = np.full(nb, np.nan)
    counts = np.zeros(nb, dtype=np.int64)
    for k in range(1, nb + 1):
        sel = which == k
        counts[k - 1] = int(sel.sum())
        if counts[k - 1]:
            raw[k - 1] = float(r[sel].max())
    eta = np.where(np.isnan(raw), np.nan, np.fmax.accumulate(np.nan_to_num(raw, nan=-np.inf)))
    populated = raw[~np.isnan(raw)]
    violations = int(np.sum(np.diff(populated) < 0))
    s_hat = math.inf
    excess = r - t
    for s in s_grid():
        sel = t <= (1 / s if s > 0 else math.inf)
        if not sel.any() or excess[sel].max() <= s:
            s_hat = float(s)
            break
    one = int(np.searchsorted(edges, 1.0)) - 1
    return EtaReport(edges, raw, eta, counts, s_hat, float(raw[one]), violations)


@dataclass(frozen=True)
class AhlforsReport:
    K: float
    witness: tuple[Fraction, Fraction]
    n_pairs: int


def ahlfors_constant(curve: GraphCurve, pair_budget: int, seed: int = 0) -> AhlforsReport:
    """Max over sampled ``a < b`` of ``diam / |Gamma(a) - Gamma(b)|``.

    The diameter is estimated as the largest distance from up to 257 strided
    points of ``[a, b]`` (endpoints included) to the farther endpoint, which
    lies within a factor 2 of the true diameter of the sampled arc.
    """
    n = len(curve)
    step = 4 ** max(curve.depth - COARSE_LEVEL, 0)
    idx = np.arange(0, n, step)
    A, B = np.meshgrid(idx, idx, indexing="ij")
    pairs = [np.stack([A[A < B], B[A < B]], axis=1)]
    for k in range(-(-pair_budget // BLOCK)):
        rng = np.random.default_rng([seed, k, 1])
        a = rng.integers(0, n - 1, BLOCK)
        span = np.floor(np.exp(rng.uniform(0, math.log(n), BLOCK))).astype(np.int64)
        b = np.minimum(a + np.maximum(span, 1), n - 1)
        pairs.append(np.stack([a, b], axis=1))
    P = np.concatenate(pairs)
    a, b = P[:, :1], P[:, 1:]
    frac = np.arange(257)[None, :]
    inner = a + ((b - a) * frac) // 256
    diam = np.maximum(curve.dist(inner, a), curve.dist(inner, b)).max(axis=1)
    K = diam / curve.dist(P[:, 0], P[:, 1])
    i = int(np.argmax(K))
    return AhlforsReport(float(K[i]), (curve.t(P[i, 0]), curve.t(P[i, 1])), len(P))


# --- affine deviation ---------------------------------------------------------------------


@dataclass(frozen=True)
class AffineReport:
    K: float
    u_part: Fraction
    v_part: Fraction
    witness: tuple[Fraction, Fraction]
    n_cells: int


def _cell_deviation(curve: GraphCurve, i0: int, i1: int) -> tuple[float, Fraction, Fraction]:
    X, Y = curve.X, curve.Y
    k = np.arange(i0, i1 + 1)
    w = i1 - i0
    # w * (Gamma - Gamma_ab) in exact integers
    ex = X[k] * w - (X[i0] * (i1 - k) + X[i1] * (k - i0))
    ey = Y[k] * w - (Y[i0] * (i1 - k) + Y[i1] * (k - i0))
    du = int(X[i1]) - int(X[i0])
    total = float(np.hypot(ex.astype(np.float64), ey.astype(np.float64)).max()) / (w * du)
    return total, Fraction(int(np.abs(ex).max()), w * du), Fraction(int(np.abs(ey).max()), w * du)


def affine_deviation_cell(curve: GraphCurve, a: QuadicLike, b: QuadicLike) -> tuple[float, Fraction, Fraction]:
    """``sup|Gamma - Gamma_ab| / (u(b) - u(a))`` on ``[a, b]`` with its u- and v-parts (exact)."""
    ia = QuadicRational.of(a).at_level(curve.depth) - curve.j0
    ib = QuadicRational.of(b).at_level(curve.depth) - curve.j0
    if not 0 <= ia < ib < len(curve):
        raise ValueError("cell must lie inside the sampled window")
    return _cell_deviation(curve, ia, ib)


def affine_deviation_audit(curve: GraphCurve, cell_budget: int = 4096) -> AffineReport:
    """Max affine deviation over 4-adic cells of levels ``0 .. depth-1`` in the window.

    At most ``cell_budget`` cells per level are used (evenly strided).
    """
    lo, hi = curve.window
    best = (-1.0, Fraction(0), Fraction(0), None)
    u_best, v_best, count = Fraction(0), Fraction(0), 0
    for level in range(curve.depth):
        if lo.level > level or hi.level > level:
            continue
        c0, c1 = lo.at_level(level), hi.at_level(level)
        cells = np.arange(c0, c1)
        if len(cells) > cell_budget:
            cells = cells[np.linspace(0, len(cells) - 1, cell_budget).astype(np.int64)]
        span = 4 ** (curve.depth - level)
        for c in cells:
            i0 = int(c) * span - curve.j0
            total, up, vp = _cell_deviation(curve, i0, i0 + span)
            count += 1
            u_best, v_best = max(u_best, up), max(v_best, vp)
            if total > best[0]:
                best = (total, up, vp, (Fraction(int(c), 4**level), Fraction(int(c) + 1, 4**level)))
    return AffineReport(best[0], u_best, v_best, best[3], count)
