"""Command-line driver: one subcommand per family of audits.

Every subcommand prints (or writes to ``--out``) a CSV table, or an SVG plot
with ``--format svg``.  ``--assert`` turns the audited inequalities into the
exit status: 0 on success, 1 when an assertion fails, 2 on a bad
configuration.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import graphkit, halfplane, measure, report, variation, zygmund
from .quadic import Gamma, QuadicRational


class ConfigError(ValueError):
    """An invalid flag combination, detected before any computation."""


@dataclass
class Result:
    rows: list
    series: list = field(default_factory=list)
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    failures: list = field(default_factory=list)


def _interval(pair) -> str:
    a, b = pair
    return f"{a}:{b}"


# --- argument types -----------------------------------------------------------------


def _gamma(text: str) -> Gamma:
    try:
        return Gamma.of(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid gamma {text!r}: {exc}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid rational {text!r}") from None


def _quadic(text: str) -> QuadicRational:
    try:
        return QuadicRational.of(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a 4-adic rational") from None


def _window(text: str) -> tuple[QuadicRational, QuadicRational]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("window must be 'lo,hi'")
    lo, hi = (_quadic(p.strip()) for p in parts)
    if not lo < hi:
        raise argparse.ArgumentTypeError("window must satisfy lo < hi")
    return lo, hi


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(p)) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None


def _rationals(text: str) -> list[Fraction]:
    return [_rational(p.strip()) for p in text.split(",") if p.strip()]


# --- subcommands ----------------------------------------------------------------------


def cmd_measure_audit(args) -> Result:
    if not 1 <= args.depth <= 8:
        raise ConfigError("--depth must lie in [1, 8]")
    meas = measure.RieszMeasure(args.gamma)
    rows = []
    for d in range(1, args.depth + 1):
        rep = measure.doubling_audit(meas, d, args.window)
        rows.append({"depth": d, "delta_hat": rep.delta_hat,
                     "witness_I": _interval(rep.witness_I), "witness_J": _interval(rep.witness_J)})
    fails = [f"delta_hat decreased at depth {b['depth']}" for a, b in zip(rows, rows[1:])
             if b["delta_hat"] < a["delta_hat"]]
    series = [(f"gamma={args.gamma}", [r["depth"] for r in rows], [float(r["delta_hat"]) for r in rows])]
    return Result(rows, series, "doubling audit", "depth", "delta_hat", fails)


def cmd_growth_check(args) -> Result:
    if not 0 < args.gamma_prime < 1:
        raise ConfigError("--gamma-prime must lie in (0, 1)")
    rep = measure.growth_envelope_check(measure.RieszMeasure(args.gamma), args.gamma_prime)
    rows = [{"t": t, "mu_normalized": v, "lower": lo, "upper": hi, "slack": s} for t, v, lo, hi, s in rep.rows]
    ts = [float(r["t"]) for r in rows]
    series = [(name, ts, [float(r[key]) for r in rows])
              for name, key in (("mu([-t,t])", "mu_normalized"), ("lower", "lower"), ("upper", "upper"))]
    fails = [f"envelope violated at t={t}" for t in rep.violations]
    return Result(rows, series, "growth envelope", "t", "normalized mass", fails)


def cmd_g_eval(args) -> Result:
    if args.tail_depth < 1:
        raise ConfigError("--tail-depth must be >= 1")
    zg = zygmund.ZygmundG(args.gamma, args.tail_depth)
    xs = args.x if args.x else [Fraction(k, 64) for k in range(65)]
    rows = []
    for x in xs:
        enc = zg.enclosure(x)
        rows.append({"x": Fraction(x), "lo": enc.lo, "mid": enc.mid, "hi": enc.hi})
    series = [("g", [float(r["x"]) for r in rows], [float(r["mid"]) for r in rows])]
    return Result(rows, series, "g", "x", "g(x)")


def cmd_seminorm(args) -> Result:
    if args.budget < 10:
        raise ConfigError("--budget must be >= 10")
    meas = measure.RieszMeasure(args.gamma)
    zg = zygmund.ZygmundG(args.gamma)
    full = zygmund.seminorm_samples(args.budget, args.seed)
    rows = []
    for b in (args.budget // 10, args.budget):
        rep = zygmund.second_difference_ratio(zg, meas, full[:b])
        x, h = rep.witness
        rows.append({"budget": b, "ratio": rep.ratio, "exact": rep.exact, "witness_x": x, "witness_h": h})
    fails = []
    if not rows[1]["exact"] <= Fraction(3, 2) * rows[0]["exact"]:
        fails.append("seminorm estimate not stable under a tenfold budget")
    series = [("ratio", [r["budget"] for r in rows], [r["ratio"] for r in rows])]
    return Result(rows, series, "second-difference ratio", "budget", "ratio", fails)


def _check_m(args):
    limit = variation.M_MAX_SLOW if args.slow else variation.M_MAX_DEFAULT
    if not 1 <= args.mmax <= limit:
        hint = " (use --slow for up to 8)" if args.mmax <= variation.M_MAX_SLOW else ""
        raise ConfigError(f"--mmax must lie in [1, {limit}]{hint}")


def cmd_variation(args) -> Result:
    _check_m(args)
    if any(q <= 0 for q in args.q):
        raise ConfigError("--q values must be positive")
    zg = zygmund.ZygmundG(args.gamma)
    series_rows = variation.quadic_variation_series(zg, args.q, args.mmax, slow=args.slow)
    rows, fails = [], []
    for sr in series_rows:
        for q in args.q:
            rows.append({"m": sr.m, "q": q, "S_m": sr.S, "V_m": sr.V[float(q)], "maxint_m": sr.maxint})
        if not sr.S >= sr.maxint / 4:
            fails.append(f"S_m < maxint_m/4 at m={sr.m}")
    series = [(f"q={q:g}", [r.m for r in series_rows], [r.V[float(q)] for r in series_rows]) for q in args.q]
    return Result(rows, series, "gauge variation", "m", "V_m", fails)


def cmd_maxint(args) -> Result:
    _check_m(args)
    rows = [{"m": m, "maxint_m": variation.max_weight_integral(args.gamma, m, slow=args.slow)}
            for m in range(1, args.mmax + 1)]
    fails = [f"maxint not strictly increasing at m={b['m']}" for a, b in zip(rows, rows[1:])
             if not b["maxint_m"] > a["maxint_m"]]
    series = [("maxint", [r["m"] for r in rows], [float(r["maxint_m"]) for r in rows])]
    return Result(rows, series, "integral of the maximal weight", "m", "maxint_m", fails)


def cmd_graph_audit(args) -> Result:
    if not 1 <= args.depth <= graphkit.MAX_DEPTH:
        raise ConfigError(f"--depth must lie in [1, {graphkit.MAX_DEPTH}]")
    if args.vscale < 0:
        raise ConfigError("--vscale must be nonnegative")
    if args.budget < 1:
        raise ConfigError("--budget must be positive")
    curve = graphkit.build_graph(measure.RieszMeasure(args.gamma), zygmund.ZygmundG(args.gamma),
                                 args.vscale, args.depth, args.window)
    qs = graphkit.weak_qs_constant(curve, args.budget, args.seed)
    eta = graphkit.eta_modulus(curve, 4, args.budget, args.seed)
    ahl = graphkit.ahlfors_constant(curve, args.budget, args.seed)
    aff = graphkit.affine_deviation_audit(curve)
    rows = [{"H_hat": qs.H, "s_hat": eta.s_hat, "K_hat": ahl.K, "eta_at_one": eta.eta_at_one,
             "affine_K": aff.K, "affine_u": aff.u_part, "affine_v": aff.v_part,
             "n_triples": qs.n_triples, "n_pairs": ahl.n_pairs}]
    step = max(1, len(curve) // 1024)
    idx = range(0, len(curve), step)
    us = [float(curve.point(i)[0]) for i in idx]
    vs = [float(curve.point(i)[1]) for i in idx]
    fails = [] if math.isfinite(qs.H) and math.isfinite(ahl.K) else ["non-finite audit constant"]
    return Result(rows, [("Gamma", us, vs)], "graph", "u", "v", fails)


def cmd_halfplane_audit(args) -> Result:
    if not 1 <= args.depth <= 8:
        raise ConfigError("--depth must lie in [1, 8]")
    h = halfplane.HerglotzMap(measure.RieszMeasure(args.gamma), args.depth)
    sweep = h.sweep(halfplane.STANDARD_XS, halfplane.STANDARD_YS)
    rows = [{"x": r["x"], "y": r["y"], "re_fprime": r["re_fprime"], "abs_fsecond": r["abs_fsecond"],
             "kernel_ratio": r["kernel_ratio"], "reduced_ratio": r["reduced_ratio"]} for r in sweep]
    fails = []
    if not all(r["re_fprime"] > 0 for r in rows):
        fails.append("Re f' not positive on the grid")
    if not max(r["reduced_ratio"] for r in rows) < 1:
        fails.append("reduced ratio reaches 1 on the grid")
    series = [(f"y={y:g}", [r["x"] for r in rows if r["y"] == y], [r["reduced_ratio"] for r in rows if r["y"] == y])
              for y in halfplane.STANDARD_YS]
    return Result(rows, series, "reduced ratio", "x", "2 y |f''| / Re f'", fails)


def cmd_trace_check(args) -> Result:
    if not args.a < args.b:
        raise ConfigError("--a must be smaller than --b")
    h = halfplane.HerglotzMap(measure.RieszMeasure(args.gamma), args.depth)
    lim = Fraction(h.T, 4)
    if abs(args.a.value) > lim or abs(args.b.value) > lim:
        raise ConfigError(f"--a and --b must satisfy |a|, |b| <= {lim}")
    mu = h.meas.mu_ab(args.a, args.b)
    res = h.trace_consistency(args.a, args.b)
    rows = [{"a": args.a.value, "b": args.b.value, "mu_exact": mu, "residual": res, "height": h.boundary_height}]
    fails = [] if res < args.tol else [f"residual {res} exceeds {args.tol}"]
    return Result(rows, [("residual", [0, 1], [res, res])], "trace residual", "", "residual", fails)


def cmd_lipschitz_check(args) -> Result:
    if args.L <= 0:
        raise ConfigError("--L must be positive")
    slopes = args.slopes if args.slopes else [args.L * Fraction(k, 8) for k in range(-8, 9)]
    if any(abs(s) > args.L for s in slopes):
        raise ConfigError("every --slopes value must satisfy |slope| <= L")
    rep = halfplane.lipschitz_delta_check(args.L, slopes)
    rows = [{**r, "k": rep.k} for r in rep.rows]
    fails = [] if rep.k < 1 and rep.max_ratio <= rep.k * (1 + 1e-15) else ["ratio exceeds k or k >= 1"]
    series = [("ratio", [float(r["slope"]) for r in rows], [r["ratio"] for r in rows]),
              ("k", [float(r["slope"]) for r in rows], [rep.k for _ in rows])]
    return Result(rows, series, "delta-monotone Lipschitz check", "slope", "|f_zbar| / Re f_z", fails)


# --- parser ---------------------------------------------------------------------------

COMMANDS = {
    "measure-audit": (cmd_measure_audit,
                      "doubling audit: max mu(I)/mu(J) - 1 over adjacent equal grid intervals, per depth"),
    "growth-check": (cmd_growth_check,
                     "envelope (1-g')t min(t,1/t)^g' <= mu([-t,t]) <= (1+g')t max(t,1/t)^g'"),
    "g-eval": (cmd_g_eval, "exact partial sums and enclosures of g = sum R_2n v_n"),
    "seminorm": (cmd_seminorm,
                 "empirical sup |g(x+h) - 2g(x) + g(x-h)| / mu([x-h, x+h]) at two budgets"),
    "variation": (cmd_variation,
                  "S_m = sum |dg| and V_m = sum Phi_q(|dg|) on the level-2m partition, with int max v_k"),
    "maxint": (cmd_maxint, "exact integral over [0,1] of max(v_1, ..., v_m)"),
    "graph-audit": (cmd_graph_audit,
                    "weak quasisymmetry H, eta-modulus s, Ahlfors K and affine deviation of Gamma = u + i s_v g"),
    "halfplane-audit": (cmd_halfplane_audit,
                        "grid sweep of Re f', |f''|, kernel ratio and 2 Im z |f''| / Re f' for the Herglotz map"),
    "trace-check": (cmd_trace_check, "boundary trace residual |Re(F(b) - F(a)) - mu([a,b])|"),
    "lipschitz-check": (cmd_lipschitz_check,
                        "|f_zbar| <= k Re f_z for f = x + i L^2 y + i g(x) with |g'| <= L"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zygqs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=_gamma, default=Gamma(1, 2), help="weight parameter p/q in [0, 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled audits")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "svg"), default="csv")
    common.add_argument("--slow", action="store_true", help="lift the default resource guards")
    common.add_argument("--assert", dest="check", action="store_true",
                        help="exit with status 1 if the audited inequality fails")
    p = {name: sub.add_parser(name, parents=[common], help=text, description=text)
         for name, (_, text) in COMMANDS.items()}

    p["measure-audit"].add_argument("--depth", type=int, default=4)
    p["measure-audit"].add_argument("--window", type=_window, default=(QuadicRational(-1), QuadicRational(2)))
    p["growth-check"].add_argument("--gamma-prime", type=float, default=0.9)
    p["g-eval"].add_argument("--x", type=_rationals, default=None, help="comma-separated rationals")
    p["g-eval"].add_argument("--tail-depth", type=int, default=8)
    p["seminorm"].add_argument("--budget", type=int, default=100_000)
    for name in ("variation", "maxint"):
        p[name].add_argument("--mmax", type=int, default=4)
    p["variation"].add_argument("--q", type=_floats, default=[0.5, 1.5], help="comma-separated gauge exponents")
    p["graph-audit"].add_argument("--vscale", type=_rational, default=Fraction(1))
    p["graph-audit"].add_argument("--depth", type=int, default=5)
    p["graph-audit"].add_argument("--budget", type=int, default=20_000)
    p["graph-audit"].add_argument("--window", type=_window, default=(QuadicRational(-1), QuadicRational(2)))
    p["halfplane-audit"].add_argument("--depth", type=int, default=6, help="density depth n (window [-4^n, 4^n])")
    p["trace-check"].add_argument("--a", type=_quadic, default=QuadicRational(0))
    p["trace-check"].add_argument("--b", type=_quadic, default=QuadicRational(1, 1))
    p["trace-check"].add_argument("--depth", type=int, default=6)
    p["trace-check"].add_argument("--tol", type=float, default=1e-2)
    p["lipschitz-check"].add_argument("--L", type=_rational, default=Fraction(2))
    p["lipschitz-check"].add_argument("--slopes", type=_rationals, default=None)
    return parser


def run(args) -> int:
    fn, _ = COMMANDS[args.command]
    try:
        result = fn(args)
    except ConfigError as exc:
        print(f"zygqs {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.format == "csv":
        text = report.csv_text(result.rows)
    else:
        text = report.svg_text(result.series, result.title, result.xlabel, result.ylabel)
    if args.out:
        report.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.check and result.failures:
        for f in result.failures:
            print(f"assertion failed: {f}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
