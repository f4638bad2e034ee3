from fractions import Fraction

import numpy as np
import pytest

from zygqs.measure import RieszMeasure
from zygqs.quadic import Gamma
from zygqs.zygmund import (
    Antiderivative,
    Exemplar,
    PairSamples,
    ZygmundG,
    affine_deviation,
    classical_seminorm_estimate,
    second_difference_ratio,
    seminorm_samples,
)

import oracles

HALF = Fraction(1, 2)


def test_exact_examples():
    zg = ZygmundG("1/2")
    assert zg.exact(0) == 0
    assert zg.exact(Fraction(1, 8), 1) == Fraction(1, 16)
    assert zg.exact(Fraction(1, 4), 1) == 0
    with pytest.raises(ValueError):
        zg.exact(Fraction(1, 64), 1)


@pytest.mark.parametrize("gamma", ["0", "1/3", "1/2"])
def test_exact_matches_definition(gamma):
    zg = ZygmundG(gamma)
    g = Fraction(gamma)
    for j in range(0, 4**4 + 1, 5):
        x = Fraction(j, 4**4)
        assert zg.exact(x, 2) == oracles.g_partial(2, g, x)


def test_scaled_matches_exact():
    zg = ZygmundG("2/5")
    L = 6
    j = np.arange(-4**L, 2 * 4**L + 1, 37)
    G = zg.scaled(j, L)
    for k, val in zip(j, G):
        assert Fraction(int(val), zg.scale(L)) == zg.exact(Fraction(int(k), 4**L))


def test_bounded_by_geometric_series():
    zg = ZygmundG("1/2")
    L = 8
    G = zg.scaled(np.arange(4**L), L)
    assert Fraction(int(np.abs(G).max()), zg.scale(L)) <= zg.sup_bound()


def test_enclosures():
    zg = ZygmundG("1/2", tail_depth=3)
    enc = zg.enclosure(0)
    assert enc.lo <= 0 <= enc.hi
    assert zg.enclosure(Fraction(1, 8)).mid == Fraction(1, 16)
    x = Fraction(37, 4**6)
    assert zg.exact(x) in zg.enclosure(x)
    assert zg.enclosure(x, 3).mid == zg.exact(x)
    w = [zg.enclosure(Fraction(1, 3), m).width for m in range(2, 7)]
    for a, b in zip(w, w[1:]):
        assert b * 16 / (1 + HALF) <= a * (1 + Fraction(1, 10**9))
    assert w[0] <= 2 * (1 + HALF) ** 2 / 4**4 / (1 - (1 + HALF) / 16)


def test_period_one_structure():
    zg = ZygmundG("1/2")
    for j in range(0, 4**5, 7):
        x = Fraction(j, 4**5)
        assert zg.exact(x + 1) == zg.exact(x)
        assert zg.exact(x - 1) == zg.exact(x)


def test_second_difference_examples():
    meas = RieszMeasure("1/2")
    zg = ZygmundG("1/2")
    probe = PairSamples.from_pairs([(Fraction(1, 8), Fraction(1, 8))])
    assert second_difference_ratio(zg, meas, probe).exact == HALF
    affine = lambda x: 3 * x + 1  # noqa: E731
    samples = PairSamples.from_pairs([(Fraction(j, 64), Fraction(1, 16)) for j in range(64)])
    assert second_difference_ratio(affine, meas, samples).ratio == 0
    u = Antiderivative(meas)
    rep = second_difference_ratio(u, meas, seminorm_samples(20000, seed=2))
    assert rep.exact <= 1


def test_seminorm_is_stable():
    meas = RieszMeasure("1/2")
    zg = ZygmundG("1/2")
    s = seminorm_samples(100_000, seed=0)
    full = second_difference_ratio(zg, meas, s).exact
    tenth = second_difference_ratio(zg, meas, s[:10_000]).exact
    assert 0 < full <= Fraction(3, 2) * tenth


def test_samples_are_reproducible():
    a, b = seminorm_samples(5000, seed=9), seminorm_samples(5000, seed=9)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.hs, b.hs)
    assert len(a) == 5000 and np.all(a.hs > 0)


def test_classical_estimates():
    dyadic = np.arange(16, 240) / 256
    assert classical_seminorm_estimate(Exemplar("identity"), dyadic, np.full(224, 1 / 64)).ratio == 0
    xs = np.linspace(0.05, 0.9, 200)
    coarse = classical_seminorm_estimate(Exemplar("xlogx"), xs, np.full(200, 1e-2)).ratio
    fine = classical_seminorm_estimate(Exemplar("xlogx"), np.linspace(1e-3, 0.9, 4000), np.full(4000, 1e-4)).ratio
    assert fine < 2 * coarse + 1
    hs = 4.0 ** -np.arange(2, 9)
    cube = [classical_seminorm_estimate(Exemplar("cuberoot"), [h], [h]).ratio for h in hs]
    assert all(b > a for a, b in zip(cube, cube[1:]))


def test_exemplar_flags():
    assert Exemplar("xlogx").in_zygmund and Exemplar("weierstrass").in_zygmund
    # x**(1/3) fails the Zygmund condition at 0 although its graph is quasisymmetric
    assert not Exemplar("cuberoot").in_zygmund and Exemplar("cuberoot").qs_graph
    assert Exemplar("sqrtplus").quasiline and not Exemplar("sqrtplus").qs_graph
    with pytest.raises(ValueError):
        Exemplar("nope")


def test_affine_deviation():
    grid = [Fraction(j, 64) for j in range(17)]
    assert affine_deviation(lambda x: 2 * x - 1, 0, Fraction(1, 4), grid) == 0
    zg = ZygmundG("1/2")
    meas = RieszMeasure("1/2")
    M = second_difference_ratio(zg, meas, seminorm_samples(20000)).exact
    grid = [Fraction(j, 4**4) for j in range(4**3 + 1)]
    assert affine_deviation(zg.exact, 0, Fraction(1, 4), grid) <= 2 * M * meas.mu_ab(0, Fraction(1, 4))


def test_antiderivative_affine_deviation_level3():
    meas = RieszMeasure("1/4")
    u = Antiderivative(meas)
    worst = Fraction(0)
    for j in range(4**3):
        a, b = Fraction(j, 64), Fraction(j + 1, 64)
        grid = [a + (b - a) * Fraction(k, 64) for k in range(65)]
        worst = max(worst, affine_deviation(u, a, b, grid) / (u(b) - u(a)))
    assert worst < 1


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        ZygmundG(Gamma(1, 2), tail_depth=0)
    with pytest.raises(ValueError):
        affine_deviation(lambda x: x, 1, 0, [])
