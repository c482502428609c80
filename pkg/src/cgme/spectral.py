"""Fourier-space correlation functions of the thermal massless scalar field.

Blocks are labelled by the atom pair ``(alpha, beta)``; the strings
``"11"``, ``"22"``, ``"12"``, ``"21"`` are accepted too. Diagonal blocks see
no spatial factor, off-diagonal blocks pick up sinc(ell * omega).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .core import ValidationError, sinc

__all__ = [
    "parse_block",
    "g_fourier",
    "g_even_odd",
    "g_even_odd_high_temperature",
    "k12_even",
    "k12_even_pv",
]


def parse_block(block) -> tuple[int, int]:
    try:
        if isinstance(block, str):
            block = tuple(int(ch) for ch in block.strip())
        alpha, beta = (int(v) for v in block)
    except (TypeError, ValueError):
        raise ValidationError(f"bad block label {block!r}") from None
    if alpha not in (1, 2) or beta not in (1, 2):
        raise ValidationError(f"bad block label {block!r}")
    return alpha, beta


def _spatial(block, omega, ell):
    alpha, beta = parse_block(block)
    if alpha == beta:
        return np.ones_like(omega)
    return sinc(ell * omega)


def _bose_weight(x):
    # x / (1 - exp(-x)), removable value 1 at x = 0
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    with np.errstate(over="ignore", invalid="ignore"):
        direct = xs / -np.expm1(-xs)
    direct = np.where(np.isfinite(direct), direct, 0.0)
    series = 1.0 + x / 2.0 + x * x / 12.0 - x**4 / 720.0
    return np.where(small, series, direct)


def _x_coth_x(y):
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-4
    ys = np.where(small, 1.0, y)
    series = 1.0 + y * y / 3.0 - y**4 / 45.0
    return np.where(small, series, ys / np.tanh(ys))


def _regulator(omega, epsilon):
    return np.exp(-epsilon * np.abs(omega)) if epsilon else 1.0


def g_fourier(block, omega, beta, ell, epsilon=0.0):
    """Fourier transform of the smeared two-point function for one block.

    ``beta = inf`` gives the vacuum, (omega/2pi) step(omega).
    """
    omega = np.asarray(omega, dtype=float)
    if math.isinf(beta):
        base = np.where(omega > 0, omega, 0.0) / (2 * math.pi)
    else:
        base = _bose_weight(beta * omega) / (2 * math.pi * beta)
    out = base * _spatial(block, omega, ell) * _regulator(omega, epsilon)
    return out if out.ndim else float(out)


def g_even_odd(block, omega, beta, ell, epsilon=0.0):
    """The combinations G(omega) + G(-omega) and G(omega) - G(-omega)."""
    omega = np.asarray(omega, dtype=float)
    space = _spatial(block, omega, ell) * _regulator(omega, epsilon)
    if math.isinf(beta):
        plus = np.abs(omega) / (2 * math.pi)
    else:
        plus = _x_coth_x(beta * omega / 2) / (math.pi * beta)
    minus = omega / (2 * math.pi)
    plus, minus = plus * space, minus * space
    if plus.ndim == 0:
        return float(plus), float(minus)
    return plus, minus


def g_even_odd_high_temperature(block, omega, beta, ell):
    """Even/odd combinations with coth(beta omega/2) replaced by 2/(beta omega)."""
    if not math.isfinite(beta):
        raise ValidationError("high-temperature kernel needs a finite beta")
    omega = np.asarray(omega, dtype=float)
    space = _spatial(block, omega, ell)
    plus = space / (math.pi * beta) * np.ones_like(omega)
    minus = omega / (2 * math.pi) * space
    if plus.ndim == 0:
        return float(plus), float(minus)
    return plus, minus


def k12_even(omega, ell):
    """Vacuum part of K12(omega) + K12(-omega), a purely imaginary number."""
    if not ell > 0:
        raise ValidationError("induced coupling is singular for coincident atoms (ell = 0)")
    omega = np.asarray(omega, dtype=float)
    out = np.asarray(-1j * np.cos(ell * omega) / (2 * math.pi * ell))
    return out if out.ndim else complex(out)


def k12_even_pv(omega: float, ell: float, *, tol: float = 1e-10) -> complex:
    """Numerical principal value of (1/2 pi^2 i) P int z/(z+omega) sinc(ell z) dz.

    Independent of :func:`k12_even`: the pole neighbourhood uses QUADPACK's
    Cauchy weight and the tails its Fourier routine.
    """
    if not ell > 0:
        raise ValidationError("ell must be positive")
    # z/(z+omega) sinc(ell z) = sin(ell z) / (ell (z + omega))
    half = 20.0 / ell + abs(omega)
    lo, hi = -omega - half, -omega + half
    fourier = dict(weight="sin", wvar=ell, epsabs=tol * 1e-2, limlst=200)
    central = integrate.quad(
        lambda z: math.sin(ell * z) / ell, lo, hi,
        weight="cauchy", wvar=-omega, epsabs=tol * 1e-3, epsrel=tol, limit=2000,
    )[0]
    right = integrate.quad(lambda z: 1.0 / (ell * (z + omega)), hi, np.inf, **fourier)[0]
    # left tail after z -> -y
    left = integrate.quad(lambda y: -1.0 / (ell * (omega - y)), -lo, np.inf, **fourier)[0]
    return (central + right + left) / (2 * math.pi**2 * 1j)
