import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgme.core import ValidationError, sinc
from cgme.spectral import (
    g_even_odd,
    g_even_odd_high_temperature,
    g_fourier,
    k12_even,
    k12_even_pv,
    parse_block,
)


def test_parse_block():
    assert parse_block("12") == (1, 2)
    assert parse_block((2, 1)) == (2, 1)
    for bad in ("13", (0, 1), "x", 5):
        with pytest.raises(ValidationError):
            parse_block(bad)


def test_zero_frequency_limit():
    beta = 0.7
    assert g_fourier("11", 0.0, beta, 0.0) == pytest.approx(1 / (2 * math.pi * beta), rel=1e-15)
    assert g_fourier("11", 1e-9, beta, 0.0) == pytest.approx(1 / (2 * math.pi * beta), rel=1e-8)


@given(st.floats(-30, 30).filter(lambda w: abs(w) > 1e-3), st.floats(0.05, 5))
def test_kms_detailed_balance(omega, beta):
    forward = g_fourier("11", omega, beta, 0.0)
    backward = g_fourier("11", -omega, beta, 0.0)
    assert backward == pytest.approx(math.exp(-beta * omega) * forward, rel=1e-12)


@given(st.floats(-20, 20), st.floats(0.05, 5), st.floats(0.0, 4.0))
def test_block_symmetry_and_spatial_ratio(omega, beta, ell):
    g11 = g_fourier("11", omega, beta, ell)
    assert g_fourier("22", omega, beta, ell) == g11
    assert g_fourier("12", omega, beta, ell) == g_fourier("21", omega, beta, ell)
    assert g_fourier("12", omega, beta, ell) == pytest.approx(g11 * sinc(ell * omega), rel=1e-14, abs=1e-300)


@given(st.floats(-20, 20), st.floats(0.05, 5), st.floats(0.0, 4.0))
def test_even_odd_combinations(omega, beta, ell):
    plus, minus = g_even_odd("12", omega, beta, ell)
    g_pos = g_fourier("12", omega, beta, ell)
    g_neg = g_fourier("12", -omega, beta, ell)
    scale = abs(g_pos) + abs(g_neg) + 1e-300
    assert abs(plus - (g_pos + g_neg)) <= 1e-12 * scale
    assert abs(minus - (g_pos - g_neg)) <= 1e-12 * scale
    assert abs((plus - minus) - 2 * g_neg) <= 1e-12 * scale


def test_odd_part_is_temperature_independent():
    for beta in (0.1, 1.0, 10.0, math.inf):
        assert g_even_odd("11", 1.3, beta, 0.0)[1] == pytest.approx(1.3 / (2 * math.pi), rel=1e-15)


def test_high_temperature_limit():
    beta = 1e-3
    plus, _ = g_even_odd("11", 1.0, beta, 0.0)
    assert plus == pytest.approx(1 / (math.pi * beta), rel=1e-6)
    plus_ht, minus_ht = g_even_odd_high_temperature("11", 1.0, beta, 0.0)
    assert plus_ht == pytest.approx(1 / (math.pi * beta), rel=1e-15)
    assert minus_ht == pytest.approx(1 / (2 * math.pi))


def test_vacuum():
    assert g_fourier("11", -2.0, math.inf, 0.0) == 0.0
    assert g_fourier("11", 2.0, math.inf, 0.0) == pytest.approx(1 / math.pi)
    plus, minus = g_even_odd("11", -2.0, math.inf, 0.0)
    assert plus == pytest.approx(1 / math.pi) and minus == pytest.approx(-1 / math.pi)


def test_regulator_factor():
    bare = g_fourier("11", 3.0, 1.0, 0.0)
    assert g_fourier("11", 3.0, 1.0, 0.0, epsilon=0.2) == pytest.approx(bare * math.exp(-0.6))


def test_k12_even_examples():
    ell = 0.8
    assert k12_even(0.0, ell) == pytest.approx(1 / (2j * math.pi * ell))
    assert abs(k12_even(math.pi / 2 / ell, ell)) < 1e-16
    with pytest.raises(ValidationError):
        k12_even(1.0, 0.0)


@pytest.mark.parametrize("omega,ell", [(0.0, 1.0), (1.3, 0.4), (-2.0, 0.25), (0.5, 3.0)])
def test_k12_even_matches_principal_value_quadrature(omega, ell):
    closed = k12_even(omega, ell)
    numeric = k12_even_pv(omega, ell)
    assert abs(numeric - closed) <= 1e-5 * abs(closed) + 1e-12
