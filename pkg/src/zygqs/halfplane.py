"""Herglotz construction on the upper half-plane and its reflection extension.

For the measure ``mu`` (approximated on ``[-T, T]``, ``T = 4**n``, by the
piecewise constant density ``v_n``) we build the analytic ``f`` with

    f'(z)  = 1/(pi i) * int [1/(t-z) - t/(1+t^2)] dmu(t)
    f''(z) = 1/(pi i) * int (t-z)^-2 dmu(t)
    Re f'(z) = Im z / pi * int |t-z|^-2 dmu(t)

and the extension ``F(z) = f(conj z) + (z - conj z) f'(conj z)`` below the
axis.  The integrals are accumulated over a 4-adic cell tree: a cell whose
half-width is at most ``theta`` times its distance to every evaluation point
is summed through a Taylor expansion using the exact moments of the
normalized measure on that cell (these depend only on the cell level, by
self-similarity); cells that stay close down to the density level are
integrated in closed form.  Every result carries a bound for the expansion
remainder and for the tail ``|t| > T`` (each unit interval has mass 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .measure import RieszMeasure
from .quadic import RHO_TABLE, Gamma, QuadicLike, QuadicRational

_RHO = np.array(RHO_TABLE, dtype=np.float64)


@lru_cache(maxsize=64)
def level_moments(gamma: Gamma, depth: int, order: int) -> dict[int, np.ndarray]:
    """Centered moments ``int u**p dnu_l(u)``, ``u in [-1, 1)``, for every level.

    ``nu_l`` is the normalized restriction of the density-``depth`` measure to
    a level-``l`` cell, pulled back to ``[-1, 1)``.  Computed exactly.
    """
    finest = 2 * depth - 1
    g = gamma.value
    cur = [Fraction(1, p + 1) if p % 2 == 0 else Fraction(0) for p in range(order + 1)]
    out = {finest: cur}
    for level in range(finest - 1, -depth - 1, -1):
        k = level + 1
        weighted = k % 2 == 1 and 1 <= k <= finest
        nxt = []
        for p in range(order + 1):
            acc = Fraction(0)
            for d in range(4):
                e = 2 * d - 3
                f = 1 + g * RHO_TABLE[d] if weighted else Fraction(1)
                acc += f * sum(comb(p, i) * Fraction(e) ** (p - i) * cur[i] for i in range(p + 1))
            nxt.append(acc / 4 ** (p + 1))
        cur = nxt
        out[level] = cur
    return {lv: np.array([float(c) for c in cs]) for lv, cs in out.items()}


def _cplx(re, im) -> np.ndarray:
    """Complex array with the given parts (keeps the sign of a zero imaginary part)."""
    out = np.empty(np.broadcast(re, im).shape, dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


def _log_lower(t, z: complex) -> np.ndarray:
    """``log(t - z)`` on the branch continuous in the closed lower half-plane."""
    return _cplx(0.5 * np.log((t - z.real) ** 2 + z.imag**2), np.arctan2(-z.imag, t - z.real))


def _xlog_antideriv(t, z: complex) -> np.ndarray:
    """Antiderivative ``(t-z) log(t-z) - (t-z)`` of ``log(t - z)``."""
    w = _cplx(t - z.real, -z.imag)
    zero = np.abs(w) == 0
    lg = _log_lower(np.where(zero, z.real + 1.0, t), z)
    return np.where(zero, 0.0, w * lg) - w


def cell_integrals(t0, t1, z: complex, density=1.0) -> dict[str, np.ndarray]:
    """Closed-form integrals of the kernels over ``[t0, t1]`` with constant density.

    Keys: ``cauchy`` = int 1/(t-z), ``square`` = int (t-z)^-2,
    ``poisson`` = int |t-z|^-2 (needs Im z > 0), ``log`` = int log(t-z).
    """
    t0 = np.asarray(t0, dtype=np.float64)
    t1 = np.asarray(t1, dtype=np.float64)
    x, y = z.real, z.imag
    out = {
        "cauchy": density * (_log_lower(t1, z) - _log_lower(t0, z)),
        "square": density * (1.0 / _cplx(t0 - x, -y) - 1.0 / _cplx(t1 - x, -y)),
        "log": density * (_xlog_antideriv(t1, z) - _xlog_antideriv(t0, z)),
    }
    if y > 0:
        out["poisson"] = density / y * (np.arctan((t1 - x) / y) - np.arctan((t0 - x) / y))
    return out


def _horner(coefs: np.ndarray, w: np.ndarray) -> np.ndarray:
    acc = np.full(w.shape, coefs[-1], dtype=np.complex128)
    for c in coefs[-2::-1]:
        acc = acc * w + c
    return acc


@dataclass(frozen=True)
class CellSums:
    """Kernel integrals at one point, with error bounds."""

    cauchy: complex
    square: complex
    log: complex | None
    remainder: float
    tail: float
    n_far: int
    n_near: int


@dataclass(frozen=True)
class Evaluation:
    value: complex
    bound: float


def _as_complex(z) -> complex:
    if isinstance(z, ComplexPoint):
        return z.z
    return complex(z)


@dataclass(frozen=True)
class ComplexPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("ComplexPoint needs finite coordinates")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class HerglotzMap:
    meas: RieszMeasure
    density_depth: int = 6
    order: int = 24
    theta: float = 0.25

    def __post_init__(self):
        if self.density_depth < 1:
            raise ValueError("density_depth must be >= 1")
        if not 0 < self.theta <= 0.5:
            raise ValueError("theta must lie in (0, 1/2]")

    @property
    def T(self) -> int:
        return 4**self.density_depth

    @property
    def finest(self) -> int:
        return 2 * self.density_depth - 1

    @property
    def boundary_height(self) -> float:
        return 4.0 ** (-2 * self.density_depth)

    @cached_property
    def _moments(self):
        return level_moments(self.meas.gamma, self.density_depth, self.order)

    def _weights(self, level: int, js: np.ndarray) -> np.ndarray:
        """Mass of the cells ``I(level, j)`` under the density ``v_n``."""
        g = float(self.meas.gamma.value)
        w = np.ones(js.shape)
        for k in range(1, min(level, self.finest) + 1, 2):
            w = w * (1.0 + g * _RHO[(js >> (2 * (level - k))) & 3])
        return w * 4.0 ** (-level)

    def _traverse(self, zs: Sequence[complex]):
        pts = np.array(zs, dtype=np.complex128)
        level, js = -self.density_depth, np.array([-1, 0], dtype=np.int64)
        far = []
        while True:
            size = 4.0 ** (-level)
            c = (js + 0.5) * size
            dist = np.min(np.abs(c[:, None] - pts[None, :]), axis=1)
            isfar = 0.5 * size <= self.theta * dist
            if isfar.any():
                far.append((level, js[isfar]))
            rest = js[~isfar]
            if level == self.finest or rest.size == 0:
                return far, (level, rest)
            js = (4 * rest[:, None] + np.arange(4)).ravel()
            level += 1

    def _tail(self, z: complex) -> dict[str, float]:
        T, az = self.T, abs(z)
        if T < 2 * (az + 1):
            return {"cauchy": math.inf, "square": math.inf, "log": math.inf, "poisson": math.inf}
        dzi = abs(z - 1j)
        return {
            "square": 2.0 / (T - az - 1),
            "poisson": 2.0 / (T - az - 1),
            "cauchy": 4.0 * (1.0 / T + az) / (T - 1),
            "log": 2.0 * (dzi + dzi**2) / (T - 1),
        }

    def _cells(self, z: complex, far, near, with_log: bool):
        """Per-cell contributions at ``z`` (lists of arrays), plus remainder bound."""
        P = self.order
        idx = np.arange(P + 1)
        parts = {"cauchy": [], "square": [], "log": []}
        remainder = 0.0
        for level, js in far:
            C = self._moments[level]
            size = 4.0 ** (-level)
            r = 0.5 * size
            c = (js + 0.5) * size
            mass = self._weights(level, js)
            d = _cplx(c - z.real, -z.imag)
            w = -r / d
            rho = np.abs(w)
            parts["cauchy"].append(mass * _horner(C, w) / d)
            parts["square"].append(mass * _horner((idx + 1) * C, w) / d**2)
            if with_log:
                series = w * _horner(C[1:] / idx[1:], w)
                parts["log"].append(mass * (_log_lower(c, z) - series))
            tailr = rho ** (P + 1) / (1 - rho)
            absd = np.abs(d)
            remainder += float(np.sum(mass * tailr * (1 / absd + (P + 2) / ((1 - rho) * absd**2) + 1 / (P + 1))))
        level, js = near
        if js.size:
            size = 4.0 ** (-level)
            dens = self._weights(level, js) / size
            ci = cell_integrals(js * size, (js + 1) * size, z, dens)
            parts["cauchy"].append(ci["cauchy"])
            parts["square"].append(ci["square"])
            if with_log:
                parts["log"].append(ci["log"])
        return parts, remainder

    def sums(self, z, with_log: bool = False) -> CellSums:
        """Cauchy, squared and (optionally) log kernel integrals over ``[-T, T]``."""
        z = _as_complex(z)
        far, near = self._traverse([z])
        parts, rem = self._cells(z, far, near, with_log)
        tot = {k: complex(np.sum(np.concatenate(v))) if v else 0j for k, v in parts.items()}
        tail = self._tail(z)
        return CellSums(
            tot["cauchy"], tot["square"], tot["log"] if with_log else None,
            rem, max(tail["cauchy"], tail["square"]),
            sum(len(j) for _, j in far), len(near[1]),
        )

    # -- derived quantities -----------------------------------------------------

    @cached_property
    def _regularizer(self) -> float:
        """``int t/(1+t^2) dmu`` over the window (real part of the Cauchy sum at i)."""
        return self.sums(1j).cauchy.real

    @staticmethod
    def _upper(z) -> complex:
        z = _as_complex(z)
        if not z.imag > 0:
            raise ValueError(f"point {z} is not in the upper half-plane")
        return z

    def f_prime(self, z) -> complex:
        z = self._upper(z)
        return (self.sums(z).cauchy - self._regularizer) / (math.pi * 1j)

    def f_prime_eval(self, z) -> Evaluation:
        z = self._upper(z)
        s = self.sums(z)
        tail = self._tail(z)["cauchy"] + self._tail(1j)["cauchy"]
        return Evaluation((s.cauchy - self._regularizer) / (math.pi * 1j), (tail + s.remainder) / math.pi)

    def re_f_prime(self, z) -> float:
        z = self._upper(z)
        return self.sums(z).cauchy.imag / math.pi

    def f_second(self, z) -> complex:
        z = self._upper(z)
        return self.sums(z).square / (math.pi * 1j)

    def f_second_eval(self, z) -> Evaluation:
        z = self._upper(z)
        s = self.sums(z)
        return Evaluation(s.square / (math.pi * 1j), (self._tail(z)["square"] + s.remainder) / math.pi)

    def kernel_ratio(self, z) -> float:
        """``|int (t-z)^-2 dmu| / int |t-z|^-2 dmu``."""
        z = self._upper(z)
        s = self.sums(z)
        return abs(s.square) * z.imag / s.cauchy.imag

    def reduced_ratio(self, z) -> float:
        """``2 Im z |f''(z)| / Re f'(z)``."""
        z = self._upper(z)
        s = self.sums(z)
        fpp = abs(s.square / (math.pi * 1j))
        return 2.0 * z.imag * fpp / (s.cauchy.imag / math.pi)

    def f(self, z) -> complex:
        """``f(z) = i + int_i^z f'``, for ``Im z >= 0``."""
        z = _as_complex(z)
        if z.imag < 0:
            raise ValueError(f"f is defined on the closed upper half-plane, got {z}")
        if z == 1j:
            return 1j
        far, near = self._traverse([z, 1j])
        pz, _ = self._cells(z, far, near, with_log=True)
        pi_, _ = self._cells(1j, far, near, with_log=True)
        dL = complex(np.sum(np.concatenate(pz["log"]) - np.concatenate(pi_["log"])))
        return 1j + (-dL - (z - 1j) * self._regularizer) / (math.pi * 1j)

    def extend_F(self, z) -> complex:
        """The reflection extension: ``f`` above, ``f(zb) + (z - zb) f'(zb)`` below."""
        z = _as_complex(z)
        if z.imag >= 0:
            return self.f(z)
        zb = z.conjugate()
        return self.f(zb) + (z - zb) * self.f_prime(zb)

    def trace_consistency(self, a: QuadicLike, b: QuadicLike) -> float:
        """``|Re(F(b) - F(a)) - mu([a, b])|`` with boundary values taken at height 4**-2n."""
        a, b = QuadicRational.of(a), QuadicRational.of(b)
        if not a < b:
            raise ValueError("trace_consistency needs a < b")
        lim = Fraction(self.T, 4)
        if abs(a.value) > lim or abs(b.value) > lim:
            raise ValueError(f"endpoints must satisfy |a|, |b| <= T/4 = {lim}")
        y = self.boundary_height
        diff = self.f(complex(float(b), y)) - self.f(complex(float(a), y))
        return abs(diff.real - float(self.meas.mu_ab(a, b)))

    def sweep(self, xs: Iterable[float], ys: Iterable[float]) -> list[dict]:
        """Grid rows of ``Re f'``, ``|f''|``, kernel and reduced ratios."""
        rows = []
        for y in ys:
            for x in xs:
                z = complex(x, y)
                s = self.sums(z)
                re_fp = s.cauchy.imag / math.pi
                fpp = abs(s.square) / math.pi
                rows.append({
                    "x": float(x), "y": float(y),
                    "re_fprime": re_fp, "abs_fsecond": fpp,
                    "kernel_ratio": abs(s.square) * y / s.cauchy.imag,
                    "reduced_ratio": 2.0 * y * fpp / re_fp,
                })
        return rows


STANDARD_XS = tuple(-2 + k / 8 for k in range(33))
STANDARD_YS = tuple(4.0**-k for k in range(3, -2, -1))


# --- Lipschitz graphs and delta-monotone maps ------------------------------------------


@dataclass
class LipschitzReport:
    L: Fraction
    k: float
    max_ratio: float
    rows: list = field(default_factory=list)


def lipschitz_delta_check(L, slopes: Iterable) -> LipschitzReport:
    """Derivatives of ``f(z) = Re z + i L^2 Im z + i g(Re z)`` for given slopes ``g'``.

    ``f_z = (1 + L^2 + i g')/2`` and ``f_zbar = (1 - L^2 + i g')/2``; returns
    exact ``Re f_z`` and ``|f_zbar|^2`` with the ratio ``|f_zbar| / Re f_z``.
    """
    L = Fraction(L) if not isinstance(L, float) else Fraction(L).limit_denominator(10**12)
    if L <= 0:
        raise ValueError("L must be positive")
    k = math.sqrt((L * L - 1) ** 2 + L * L) / (L * L + 1)
    rows, worst = [], 0.0
    for s in slopes:
        s = Fraction(s) if not isinstance(s, float) else Fraction(s).limit_denominator(10**12)
        if abs(s) > L:
            raise ValueError(f"slope {s} exceeds the Lipschitz constant {L}")
        fx = (1, s)  # f_x = 1 + i g'
        fy = (0, L * L)  # f_y = i L^2
        fz = (Fraction(fx[0] + fy[1], 2), Fraction(fx[1] - fy[0], 2))
        fzb = (Fraction(fx[0] - fy[1], 2), Fraction(fx[1] + fy[0], 2))
        abs2 = fzb[0] ** 2 + fzb[1] ** 2
        ratio = math.sqrt(abs2) / float(fz[0])
        worst = max(worst, ratio)
        rows.append({
            "slope": s, "re_fz": fz[0], "im_fz": fz[1], "abs_fzbar_sq": abs2,
            "abs_fzbar": math.sqrt(abs2), "ratio": ratio,
        })
    return LipschitzReport(L, k, worst, rows)
