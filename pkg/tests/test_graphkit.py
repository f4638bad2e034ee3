from fractions import Fraction

import numpy as np
import pytest

from zygqs.graphkit import (
    affine_deviation_audit,
    affine_deviation_cell,
    ahlfors_constant,
    build_graph,
    eta_modulus,
    exact_ratio_sq,
    sample_triples,
    triple_ratios,
    weak_qs_constant,
)
from zygqs.measure import RieszMeasure
from zygqs.zygmund import ZygmundG, seminorm_samples


def curve(gamma, v_scale, depth=5, window=(-1, 2)):
    return build_graph(RieszMeasure(gamma), ZygmundG(gamma), v_scale, depth, window)


@pytest.fixture(scope="module")
def line():
    return curve("0", 0, depth=4)


@pytest.fixture(scope="module")
def half():
    return curve("1/2", 1)


def test_straight_line(line):
    for i in range(0, len(line), 17):
        u, v = line.point(i)
        assert u == line.t(i) and v == 0
    assert weak_qs_constant(line, 4096).H == 1
    eta = eta_modulus(line, triple_budget=4096)
    assert eta.s_hat == 0 and eta.eta_at_one == 1
    populated = ~np.isnan(eta.eta_raw)
    assert np.all(eta.eta_raw[populated] <= eta.edges[1:][populated] * (1 + 1e-15))
    assert ahlfors_constant(line, 4096).K == 1
    aff = affine_deviation_audit(line)
    assert aff.K == 0 and aff.u_part == 0 and aff.v_part == 0


def test_sample_points(half):
    i = Fraction(1, 8) * 4**half.depth - half.j0
    assert half.point(int(i)) == (Fraction(1, 8), Fraction(1, 16))
    i = -half.j0  # t = 0
    assert half.point(i) == (0, 0)
    assert half.point(0)[0] == -1 and half.point(len(half) - 1)[0] == 2


@pytest.mark.parametrize("gamma,v_scale", [("0", 1), ("1/10", "1/10"), ("1/2", 1), ("1/2", 3)])
def test_real_part_strictly_increasing(gamma, v_scale):
    c = curve(gamma, Fraction(v_scale))
    assert np.all(np.diff(c.X) > 0)


def test_build_guards():
    with pytest.raises(ValueError):
        curve("1/2", 1, depth=7)
    with pytest.raises(ValueError):
        build_graph(RieszMeasure("1/2"), ZygmundG("1/4"), 1, 3)
    with pytest.raises(ValueError):
        curve("1/2", -1)
    with pytest.raises(ValueError):
        curve("1/2", 1, depth=1, window=(0, Fraction(1, 16)))


def test_ratios_match_exact_arithmetic(half):
    tr = sample_triples(half, 4096, seed=3)
    rng = np.random.default_rng(0)
    pick = tr[rng.choice(len(tr), 100, replace=False)]
    _, r = triple_ratios(half, pick)
    for (x, a, b), got in zip(pick, r):
        exact = float(exact_ratio_sq(half, int(x), int(a), int(b)))
        assert abs(got**2 - exact) <= 1e-12 * exact


def test_audits_monotone_in_budget(half):
    for seed in (0, 1):
        assert weak_qs_constant(half, 8192, seed).H >= weak_qs_constant(half, 4096, seed).H
        assert ahlfors_constant(half, 8192, seed).K >= ahlfors_constant(half, 4096, seed).K
        small, big = eta_modulus(half, triple_budget=4096, seed=seed), eta_modulus(half, triple_budget=8192, seed=seed)
        both = ~np.isnan(small.eta_raw)
        assert np.all(big.eta_raw[both] >= small.eta_raw[both])
        assert big.s_hat >= small.s_hat


def test_eta_report_structure(half):
    eta = eta_modulus(half, triple_budget=8192)
    populated = ~np.isnan(eta.eta)
    assert np.all(np.diff(eta.eta[populated]) >= 0)
    assert eta.counts.sum() > 0
    # t = 1 is only constrained when 1 <= 1/s, so the chain bound needs s_hat <= 1
    assert eta.s_hat > 1
    small = eta_modulus(curve("1/10", Fraction(1, 10)), triple_budget=8192)
    assert small.s_hat <= 1 and small.s_hat >= small.eta_at_one - 1
    with pytest.raises(ValueError):
        eta_modulus(half, t_bins=0)


def test_smaller_parameters_give_smaller_constants():
    small, big = curve("1/10", Fraction(1, 10)), curve("1/2", 1)
    mid = curve("1/2", Fraction(1, 2))
    assert weak_qs_constant(small, 8192).H < weak_qs_constant(big, 8192).H
    assert eta_modulus(small, triple_budget=8192).s_hat < eta_modulus(mid, triple_budget=8192).s_hat
    assert ahlfors_constant(small, 8192).K >= 1
    assert affine_deviation_audit(small).K < affine_deviation_audit(big).K


def test_affine_u_part_matches_brute_force():
    c = curve("1/2", 1, depth=4, window=(0, 1))
    mu = c.meas
    a, b = Fraction(1, 4), Fraction(1, 2)
    ua, ub = mu.mu_ab(0, a), mu.mu_ab(0, b)
    brute = Fraction(0)
    for k in range(4**3 + 1):
        x = a + (b - a) * Fraction(k, 4**3)
        line_val = ua + (x - a) / (b - a) * (ub - ua)
        brute = max(brute, abs(mu.mu_ab(0, x) - line_val))
    _, u_part, v_part = affine_deviation_cell(c, a, b)
    assert u_part == brute / (ub - ua)
    assert v_part > 0
    with pytest.raises(ValueError):
        affine_deviation_cell(c, b, a)


def test_v_seminorm_end_to_end(half):
    rep = half.v_seminorm(seminorm_samples(20000, seed=1))
    assert rep.exact is not None and 0 < rep.exact <= 2
    scaled = curve("1/2", 3).v_seminorm(seminorm_samples(20000, seed=1))
    assert scaled.exact == 3 * rep.exact


def test_audits_stable_under_budget_doubling(half):
    for audit in (lambda b: weak_qs_constant(half, b).H, lambda b: ahlfors_constant(half, b).K,
                  lambda b: eta_modulus(half, triple_budget=b).s_hat):
        one, two = audit(20000), audit(40000)
        assert one <= two < 1.2 * one
