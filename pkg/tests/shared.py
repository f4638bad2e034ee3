"""Expensive computations shared between test modules (computed once per session)."""
from functools import lru_cache

from zygqs.variation import quadic_variation_series
from zygqs.zygmund import ZygmundG

QS = (0.3, 0.5, 0.7, 0.9, 1.5, 2.0)


@lru_cache(maxsize=None)
def half_series(m_max: int = 6):
    """Rows (m, S_m, V_m by q, M_m) for gamma = 1/2."""
    return quadic_variation_series(ZygmundG("1/2"), list(QS), m_max)


# Fast invocation of every CLI subcommand, shared by the CLI tests and the
# determinism acceptance criterion.
SMOKE = {
    "measure-audit": ["--depth", "4"],
    "growth-check": ["--gamma-prime", "0.5"],
    "g-eval": ["--x", "0,1/8,5/16,1/3"],
    "seminorm": ["--budget", "20000", "--seed", "4"],
    "variation": ["--q", "0.5,1.5", "--mmax", "4"],
    "maxint": ["--mmax", "5"],
    "graph-audit": ["--gamma", "0", "--vscale", "0", "--depth", "4"],
    "halfplane-audit": ["--gamma", "1/10", "--depth", "5"],
    "trace-check": ["--a", "0", "--b", "1/4"],
    "lipschitz-check": ["--L", "2"],
}
