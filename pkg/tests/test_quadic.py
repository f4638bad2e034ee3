from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zygqs.quadic import (
    Gamma,
    QuadicInterval,
    QuadicRational,
    antideriv_R,
    antideriv_R_scaled,
    max_weight,
    rho,
    rho_array,
    weight_v,
    weight_v_scaled,
)

import oracles
import rademacher

quadics = st.builds(QuadicRational, st.integers(-(4**6), 4**6), st.integers(0, 6))


def test_equality_normalizes_levels():
    assert QuadicRational(4, 1) == QuadicRational(1, 0)
    assert QuadicRational(4, 1).normalized() == QuadicRational(1, 0)
    assert hash(QuadicRational(16, 2)) == hash(QuadicRational(1, 0))
    assert QuadicRational(1, 1) < QuadicRational(2, 1)


@given(quadics, quadics)
def test_arithmetic_is_exact(a, b):
    assert (a + b).value == a.value + b.value
    assert (a - b).value == a.value - b.value
    assert (a < b) == (a.value < b.value)
    assert (a == b) == (a.value == b.value)


def test_coercions():
    assert QuadicRational.of("5/16") == Fraction(5, 16)
    assert QuadicRational.of(Fraction(1, 2)).level == 1  # 1/2 = 2/4
    assert QuadicRational.of(0.25) == QuadicRational(1, 1)
    with pytest.raises(ValueError):
        QuadicRational.of(Fraction(1, 3))
    with pytest.raises(ValueError):
        QuadicRational(1, -1)


def test_interval_split_and_length():
    I = QuadicInterval(2, 5)
    assert I.length == Fraction(1, 16)
    kids = I.split()
    assert [k.index for k in kids] == [20, 21, 22, 23]
    assert kids[0].left == I.left and kids[-1].right == I.right
    assert sum(k.length for k in kids) == I.length
    assert I.contains(Fraction(5, 16)) and not I.contains(Fraction(6, 16))


def test_gamma_validation():
    assert Gamma(2, 4) == Gamma(1, 2)
    for p, q in [(1, 1), (-1, 2), (3, 2), (1, 0)]:
        with pytest.raises(ValueError):
            Gamma(p, q)


def test_rho_examples():
    assert rho(1, 0) == 0
    assert rho(1, Fraction(5, 16)) == 1
    assert rho(2, Fraction(6, 16)) == -1
    assert rho(1, Fraction(-1, 8)) == 0  # I(1, -1), -1 = 3 mod 4
    assert rho(1, Fraction(-3, 8)) == -1  # I(1, -2)


def test_antiderivative_examples():
    assert antideriv_R(3, 0) == 0
    assert antideriv_R(1, Fraction(1, 2)) == Fraction(1, 4)
    assert antideriv_R(2, Fraction(1, 4)) == 0
    assert antideriv_R(2, Fraction(1, 8)) == Fraction(1, 16)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_antiderivative_matches_cell_sum(n):
    for j in range(4 ** (n + 1) + 1):
        x = Fraction(j, 4 ** (n + 1))
        assert antideriv_R(n, x) == oracles.R(n, x)


def test_weight_examples():
    half = Gamma(1, 2)
    x = Fraction(5, 16)
    assert weight_v(1, half, x) == Fraction(3, 2)
    assert weight_v(1, Gamma(0), x) == 1
    assert weight_v(2, half, x) == Fraction(3, 2) * (1 + Fraction(1, 2) * rho(3, x))
    assert max_weight(1, half, x) == weight_v(1, half, x)
    assert max_weight(4, Gamma(0), x) == 1
    for j in range(64):
        y = Fraction(j, 64) + Fraction(1, 512)
        expect = weight_v(1, half, y) * (1 + Fraction(1, 2) * max(rho(3, y), 0))
        assert max_weight(2, half, y) == expect


def test_vectorized_kernels_match_scalar():
    g = Gamma(1, 3)
    L = 5
    j = np.arange(-4**L, 2 * 4**L, 7, dtype=np.int64)
    for n in range(1, 6):
        assert [rho(n, Fraction(int(k), 4**L)) for k in j] == rho_array(n, j, L).tolist()
        Rs = antideriv_R_scaled(n, j[j >= 0], L)
        assert [antideriv_R(n, Fraction(int(k), 4**L)) for k in j[j >= 0]] == [Fraction(int(r), 4**L) for r in Rs]
    vs = weight_v_scaled(3, g, j, L)
    assert [weight_v(3, g, Fraction(int(k), 4**L)) for k in j] == [Fraction(int(v), 27) for v in vs]


# --- structural properties of the step functions, exhaustive for indices up to 5 ----


@pytest.mark.parametrize("name", list(rademacher.PROPERTIES))
def test_step_function_property(name):
    assert rademacher.PROPERTIES[name]() == []
