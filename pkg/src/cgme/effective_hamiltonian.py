"""Field-induced coupling between the two atoms.

The bath generates an effective interaction sum_ij H_ij sigma_i^(1) sigma_j^(2)
with

    H_ij = (cos(th) delta_ij + sin(th) eps_ijk n_k) J_+ + (J_0 - cos(th) J_+) n_i n_j,

th = (omega1 - omega2) dt/2, scaled here by lam**2 like the dissipator. The
coefficients come from the even vacuum part of the Hilbert transform
K12(w) + K12(-w) = -i cos(ell w)/(2 pi ell):

    J_+ = (dt/4pi) int Im[K12_even(w)] sinc((w-w1)dt/2) sinc((w-w2)dt/2) dw
    J_0 = (dt/8pi) int Im[K12_even(w)] sinc(w dt/2)^2 dw

Single-atom frequency shifts are not computed: the configured gaps are taken
to be the already renormalized physical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LEVI_CIVITA, SystemConfig, ValidationError, pauli_embed, sinc, system_hamiltonian
from .quadrature import IntegralSpec, closed_J, integrate_oracle
from .spectral import k12_even

__all__ = [
    "InducedCoupling",
    "induced_j",
    "h12_matrix",
    "induced_coupling",
    "effective_hamiltonian",
    "interaction_operator",
]

H_MODES = ("exact", "closed")


@dataclass(frozen=True)
class InducedCoupling:
    j_plus: float
    j_zero: float
    h12: np.ndarray
    mode: str
    errors: tuple = (0.0, 0.0)


def _normalize_mode(mode: str) -> str:
    # the high-temperature generator pairs with the closed-form coupling
    if mode == "highT":
        return "closed"
    if mode not in H_MODES:
        raise ValidationError(f"mode must be one of {H_MODES} (or 'highT'), got {mode!r}")
    return mode


def _closed_j(cfg: SystemConfig) -> tuple[float, float]:
    cfg.require_closed_form()
    ell, dt = cfg.ell, cfg.delta_t
    a = cfg.omega1 * dt / 2
    b = cfg.omega2 * dt / 2
    j_plus = -closed_J(a, b, 2 * ell / dt) / (4 * math.pi**2 * ell)
    j_zero = (1.0 / dt - 1.0 / ell) / (8 * math.pi)
    return j_plus, j_zero


def _exact_j(cfg: SystemConfig, tol: float):
    ell, dt = cfg.ell, cfg.delta_t
    w1, w2 = cfg.omega1, cfg.omega2
    half = dt / 2

    def im_k(w):
        return np.imag(k12_even(w, ell))

    window = max(w1, w2) + max(2.0, 40.0 / dt)
    amp = -1.0 / (2 * math.pi * ell)
    spec_plus = IntegralSpec(
        kernel=lambda w: dt / (4 * math.pi) * im_k(w) * sinc((w - w1) * half) * sinc((w - w2) * half),
        window=window,
        tail_amplitude=lambda w: dt / (4 * math.pi) * amp / (half**2 * (w - w1) * (w - w2)),
        tail_waves=((ell, 0.0), (half, -w1 * half - math.pi / 2), (half, -w2 * half - math.pi / 2)),
        tol=tol,
    )
    spec_zero = IntegralSpec(
        kernel=lambda w: dt / (8 * math.pi) * im_k(w) * sinc(w * half) ** 2,
        window=window,
        tail_amplitude=lambda w: dt / (8 * math.pi) * amp / (half * w) ** 2,
        tail_waves=((ell, 0.0), (half, -math.pi / 2), (half, -math.pi / 2)),
        tol=tol,
    )
    rp = integrate_oracle(spec_plus)
    rz = integrate_oracle(spec_zero)
    return (rp.value, rz.value), (rp.error, rz.error)


def induced_j(cfg: SystemConfig, mode: str = "closed", *, tol: float = 1e-10) -> tuple[float, float]:
    """(J_+, J_0) without the lam**2 factor."""
    mode = _normalize_mode(mode)
    if not cfg.ell > 0:
        raise ValidationError("induced coupling diverges for coincident atoms (ell = 0)")
    if mode == "closed":
        return _closed_j(cfg)
    return _exact_j(cfg, tol)[0]


def h12_matrix(cfg: SystemConfig, j) -> np.ndarray:
    """Real 3x3 coupling matrix, lam**2 included."""
    j_plus, j_zero = (float(x) for x in j)
    n = cfg.nvec
    theta = cfg.omega12 * cfg.delta_t / 2
    eps_n = np.einsum("ijk,k->ij", LEVI_CIVITA, n)
    h = (math.cos(theta) * np.eye(3) + math.sin(theta) * eps_n) * j_plus
    h += (j_zero - math.cos(theta) * j_plus) * np.outer(n, n)
    return cfg.lam**2 * h


def induced_coupling(cfg: SystemConfig, mode: str = "closed", *, tol: float = 1e-10) -> InducedCoupling:
    mode = _normalize_mode(mode)
    if not cfg.ell > 0:
        raise ValidationError("induced coupling diverges for coincident atoms (ell = 0)")
    if mode == "closed":
        j, err = _closed_j(cfg), (0.0, 0.0)
    else:
        j, err = _exact_j(cfg, tol)
    return InducedCoupling(j_plus=j[0], j_zero=j[1], h12=h12_matrix(cfg, j), mode=mode, errors=err)


def interaction_operator(h12) -> np.ndarray:
    """sum_ij h12_ij sigma_i^(1) sigma_j^(2) as a 4x4 matrix."""
    h12 = np.asarray(h12)
    out = np.zeros((4, 4), dtype=complex)
    for i in range(3):
        for j in range(3):
            if h12[i, j] != 0:
                out += h12[i, j] * pauli_embed(1, i + 1) @ pauli_embed(2, j + 1)
    return out


def effective_hamiltonian(cfg: SystemConfig, mode: str = "closed", *, tol: float = 1e-10) -> np.ndarray:
    """H_S plus the induced two-atom term. With lam = 0 this is H_S for any ell."""
    h = system_hamiltonian(cfg)
    if cfg.lam == 0:
        return h
    return h + interaction_operator(induced_coupling(cfg, mode, tol=tol).h12)
