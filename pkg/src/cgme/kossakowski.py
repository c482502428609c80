"""Kossakowski matrix of the coarse-grained two-atom dissipator.

Per block (alpha, beta) the dissipator is fixed by three real integrals

    I_pm = (dt/4pi) int [G(w) +- G(-w)] sinc((w-w_a)dt/2) sinc((w-w_b)dt/2) dw
    I_0  = (dt/4pi) int [G(w) + G(-w)] sinc(w dt/2)^2 dw

combined into C_pm = I_pm cos(theta) + i I_mp sin(theta), theta =
(w_a - w_b) dt/2, and assembled as

    C_ij = C_+ delta_ij - i C_- eps_ijk n_k + (I_0 - C_+) n_i n_j

times lam**2.

Two paths compute the integrals. ``"exact"`` integrates them numerically
with either the full Bose kernel (``kernel="thermal"``) or its
high-temperature replacement (``kernel="high_temperature"``). The full
kernel grows like |w| and makes I_+ and I_0 diverge logarithmically for
pointlike atoms, so it is regulated by the form factor exp(-epsilon |w|)
and needs ``cfg.epsilon > 0``. ``"highT"`` evaluates closed forms valid for
ell <= delta_t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import LEVI_CIVITA, NumericalContractError, SystemConfig, ValidationError, sinc
from .quadrature import IntegralSpec, closed_I1_over_c, closed_I2_over_c, integrate_oracle
from .spectral import g_even_odd, g_even_odd_high_temperature, parse_block

__all__ = [
    "IntegralTriple",
    "KossakowskiMatrix",
    "MODES",
    "KERNELS",
    "integral_triple",
    "c_pm",
    "block_matrix",
    "kossakowski_matrix",
    "i_plus_printed",
    "i_minus_printed",
    "PSD_TOL",
]

MODES = ("exact", "highT")
KERNELS = ("thermal", "high_temperature")
PSD_TOL = 1e-10
BLOCKS = ((1, 1), (1, 2), (2, 1), (2, 2))


class IntegralTriple(NamedTuple):
    i_plus: float
    i_minus: float
    i_zero: float
    # quadrature error estimates; zeros for closed forms
    errors: tuple = (0.0, 0.0, 0.0)


def _check_mode(mode, kernel):
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    if kernel not in KERNELS:
        raise ValidationError(f"kernel must be one of {KERNELS}, got {kernel!r}")


def _closed_triple(alpha, beta, cfg: SystemConfig) -> IntegralTriple:
    cfg.require_high_temperature()
    cfg.require_closed_form()
    dt = cfg.delta_t
    ell = cfg.separation(alpha, beta)
    a = cfg.omega(alpha) * dt / 2
    b = cfg.omega(beta) * dt / 2
    c = 2 * ell / dt
    i_plus = closed_I2_over_c(a, b, c) / (2 * math.pi**2 * cfg.beta)
    i_minus = closed_I1_over_c(a, b, c) / (2 * math.pi**2 * dt)
    i_zero = (2 - ell / dt) / (4 * math.pi * cfg.beta)
    return IntegralTriple(i_plus, i_minus, i_zero)


def _window(cfg, w_a, w_b):
    return max(w_a, w_b) + max(2.0, 40.0 / cfg.delta_t)


def _exact_triple(alpha, beta, cfg: SystemConfig, kernel: str, tol: float) -> IntegralTriple:
    dt = cfg.delta_t
    ell = cfg.separation(alpha, beta)
    w_a, w_b = cfg.omega(alpha), cfg.omega(beta)
    block = (alpha, beta)
    if kernel == "thermal":
        if not cfg.epsilon > 0:
            raise ValidationError(
                "exact thermal kernel diverges for pointlike atoms; set epsilon > 0"
            )

        def g_pm(w):
            return g_even_odd(block, w, cfg.beta, ell, cfg.epsilon)

        def bare_pm(w):
            return g_even_odd((1, 1), w, cfg.beta, 0.0, cfg.epsilon)
    else:
        if not math.isfinite(cfg.beta):
            raise ValidationError("high-temperature kernel needs a finite beta")

        def g_pm(w):
            return g_even_odd_high_temperature(block, w, cfg.beta, ell)

        def bare_pm(w):
            return g_even_odd_high_temperature((1, 1), w, cfg.beta, 0.0)

    pref = dt / (4 * math.pi)
    half = dt / 2

    def space_amp(w):
        return 1.0 / (ell * w) if ell > 0 else 1.0

    waves = ((half, -w_a * half - math.pi / 2), (half, -w_b * half - math.pi / 2))
    zero_waves = ((half, -math.pi / 2), (half, -math.pi / 2))
    if ell > 0:
        waves += ((ell, -math.pi / 2),)
        zero_waves += ((ell, -math.pi / 2),)
    window = _window(cfg, w_a, w_b)

    values, errors = [], []
    for which in (0, 1):
        spec = IntegralSpec(
            kernel=lambda w, k=which: pref * g_pm(w)[k] * sinc((w - w_a) * half) * sinc((w - w_b) * half),
            window=window,
            tail_amplitude=lambda w, k=which: (
                pref * bare_pm(w)[k] * space_amp(w) / (half**2 * (w - w_a) * (w - w_b))
            ),
            tail_waves=waves,
            tol=tol,
        )
        res = integrate_oracle(spec)
        values.append(res.value)
        errors.append(res.error)
    spec = IntegralSpec(
        kernel=lambda w: pref * g_pm(w)[0] * sinc(w * half) ** 2,
        window=window,
        tail_amplitude=lambda w: pref * bare_pm(w)[0] * space_amp(w) / (half * w) ** 2,
        tail_waves=zero_waves,
        tol=tol,
    )
    res = integrate_oracle(spec)
    values.append(res.value)
    errors.append(res.error)
    return IntegralTriple(*values, errors=tuple(errors))


def integral_triple(block, cfg: SystemConfig, mode: str = "highT", *, kernel: str = "thermal",
                    tol: float = 1e-10) -> IntegralTriple:
    """I_+, I_- and I_0 for one block.

    ``kernel`` only matters in ``"exact"`` mode.
    """
    _check_mode(mode, kernel)
    alpha, beta = parse_block(block)
    if mode == "highT":
        return _closed_triple(alpha, beta, cfg)
    return _exact_triple(alpha, beta, cfg, kernel, tol)


def c_pm(block, cfg: SystemConfig, triple: IntegralTriple) -> tuple[complex, complex]:
    alpha, beta = parse_block(block)
    theta = (cfg.omega(alpha) - cfg.omega(beta)) * cfg.delta_t / 2
    if alpha == beta:
        return complex(triple.i_plus), complex(triple.i_minus)
    cos, sin = math.cos(theta), math.sin(theta)
    c_plus = triple.i_plus * cos + 1j * triple.i_minus * sin
    c_minus = triple.i_minus * cos + 1j * triple.i_plus * sin
    return c_plus, c_minus


def block_matrix(c_plus: complex, c_minus: complex, c_zero: float, n) -> np.ndarray:
    """3x3 block from its three scalar coefficients (no lam**2)."""
    n = np.asarray(n, dtype=float)
    eps_n = np.einsum("ijk,k->ij", LEVI_CIVITA, n)
    return c_plus * np.eye(3) - 1j * c_minus * eps_n + (c_zero - c_plus) * np.outer(n, n)


@dataclass(frozen=True)
class KossakowskiMatrix:
    """The 6x6 matrix C^(ab)_ij, lam**2 already included.

    Row/column index ``3*(alpha-1) + (i-1)``.
    """

    blocks: dict
    mode: str
    kernel: str = "thermal"
    triples: dict = field(default_factory=dict)
    lambda2_included: bool = True

    @property
    def matrix(self) -> np.ndarray:
        full = np.zeros((6, 6), dtype=complex)
        for (a, b), blk in self.blocks.items():
            full[3 * (a - 1):3 * a, 3 * (b - 1):3 * b] = blk
        return full

    def block(self, alpha: int, beta: int) -> np.ndarray:
        return self.blocks[(alpha, beta)]

    def eigenvalues(self) -> np.ndarray:
        m = self.matrix
        return np.linalg.eigvalsh(0.5 * (m + m.conj().T))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    @property
    def hermiticity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T)))

    @property
    def quadrature_errors(self) -> dict:
        return {blk: t.errors for blk, t in self.triples.items()}


def kossakowski_matrix(cfg: SystemConfig, mode: str = "highT", *, kernel: str = "thermal",
                       tol: float = 1e-10) -> KossakowskiMatrix:
    _check_mode(mode, kernel)
    lam2 = cfg.lam**2
    triples, blocks = {}, {}
    for alpha, beta in BLOCKS:
        if (beta, alpha) in triples:
            # the integrals are symmetric under alpha <-> beta
            triples[(alpha, beta)] = triples[(beta, alpha)]
        else:
            triples[(alpha, beta)] = integral_triple((alpha, beta), cfg, mode, kernel=kernel, tol=tol)
        t = triples[(alpha, beta)]
        cp, cm = c_pm((alpha, beta), cfg, t)
        blocks[(alpha, beta)] = lam2 * block_matrix(cp, cm, t.i_zero, cfg.nvec)
    km = KossakowskiMatrix(blocks=blocks, mode=mode, kernel=kernel, triples=triples)
    if mode == "exact" and kernel == "thermal" and km.min_eigenvalue < -PSD_TOL:
        raise NumericalContractError(
            f"exact Kossakowski matrix is not positive (min eigenvalue {km.min_eigenvalue!r})"
        )
    return km


# -- literal high-temperature formulas, kept for the discrepancy check ---------

def i_plus_printed(cfg: SystemConfig) -> float:
    """Off-diagonal I_+ exactly as the reference closed form writes it."""
    w1, w2, ell, dt, beta = cfg.omega1, cfg.omega2, cfg.ell, cfg.delta_t, cfg.beta
    w12 = w1 - w2
    if w12 == 0 or ell == 0:
        raise ValidationError("printed form is 0/0 at omega1 = omega2 or ell = 0")
    first = math.sin(ell * w1 / 2) / (ell * w1 / 2) * math.sin((w1 * (1 - ell / dt) - w2) * dt / 2)
    second = math.sin(ell * w2 / 2) / (ell * w2 / 2) * math.sin((w1 - w2 * (1 - ell / dt)) * dt / 2)
    return (first + second) / (math.pi * beta * w12 * dt)


def i_minus_printed(cfg: SystemConfig) -> float:
    """Off-diagonal I_- exactly as the reference closed form writes it."""
    w1, w2, ell, dt = cfg.omega1, cfg.omega2, cfg.ell, cfg.delta_t
    w12 = w1 - w2
    if w12 == 0 or ell == 0:
        raise ValidationError("printed form is 0/0 at omega1 = omega2 or ell = 0")
    return math.sin(w12 * (dt - ell) / 2) * math.sin(ell * (w1 + w2) / 2) / (math.pi * ell * w12 * dt)
