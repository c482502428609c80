"""Lindblad generator on two-qubit density matrices and its time evolution.

Density matrices are vectorized by stacking columns,
``vec(rho) = rho.flatten(order="F")``, so that

    vec(A X B) = (B^T kron A) vec(X).

With that convention the commutator -i[H, rho] becomes
``-i (1 kron H - H^T kron 1)`` and a dissipator term
``F_b rho F_a - {F_a F_b, rho}/2`` becomes
``F_a^T kron F_b - (1 kron F_a F_b + (F_a F_b)^T kron 1)/2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import NumericalContractError, SystemConfig, ValidationError, pauli_embed, validate_state
from .effective_hamiltonian import effective_hamiltonian
from .kossakowski import KossakowskiMatrix, kossakowski_matrix

__all__ = [
    "GeneratorBundle",
    "Trajectory",
    "PositivityWarning",
    "vec",
    "unvec",
    "build_generator",
    "derivative_at",
    "propagator",
    "choi_matrix",
    "evolve",
    "POSITIVITY_WARN",
    "POSITIVITY_ERROR",
]

POSITIVITY_WARN = -1e-8
POSITIVITY_ERROR = -1e-6
GENERATOR_MODES = ("exact", "highT", "closed")

_I4 = np.eye(4, dtype=complex)
# F_a for a = 3*(alpha-1) + (i-1), matching the Kossakowski matrix layout
_JUMPS = [pauli_embed(alpha, i) for alpha in (1, 2) for i in (1, 2, 3)]


class PositivityWarning(RuntimeWarning):
    """A state drifted slightly below zero, within the roundoff allowance."""


def vec(rho) -> np.ndarray:
    return np.asarray(rho).flatten(order="F")


def unvec(v) -> np.ndarray:
    return np.asarray(v).reshape((4, 4), order="F")


def commutator_superop(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    return -1j * (np.kron(_I4, h) - np.kron(h.T, _I4))


def dissipator_superop(c6) -> np.ndarray:
    c6 = np.asarray(c6, dtype=complex)
    out = np.zeros((16, 16), dtype=complex)
    for a, fa in enumerate(_JUMPS):
        for b, fb in enumerate(_JUMPS):
            if c6[a, b] == 0:
                continue
            prod = fa @ fb
            out += c6[a, b] * (
                np.kron(fa.T, fb) - 0.5 * (np.kron(_I4, prod) + np.kron(prod.T, _I4))
            )
    return out


@dataclass(frozen=True)
class GeneratorBundle:
    h_eff: np.ndarray
    kossakowski: KossakowskiMatrix
    superop: np.ndarray
    mode: str
    cfg: SystemConfig | None = None


def build_generator(cfg: SystemConfig, mode: str = "highT", *, kernel: str = "thermal",
                    tol: float = 1e-10) -> GeneratorBundle:
    """Generator for ``mode`` in {"exact", "highT"}; "closed" is an alias of "highT".

    The exact path pairs quadrature of the dissipator with quadrature of the
    induced coupling, the high-temperature path pairs the two sets of closed
    forms.
    """
    if mode not in GENERATOR_MODES:
        raise ValidationError(f"mode must be one of {GENERATOR_MODES}, got {mode!r}")
    k_mode = "exact" if mode == "exact" else "highT"
    h_mode = "exact" if mode == "exact" else "closed"
    km = kossakowski_matrix(cfg, k_mode, kernel=kernel, tol=tol)
    h = effective_hamiltonian(cfg, h_mode, tol=tol)
    superop = commutator_superop(h) + dissipator_superop(km.matrix)
    return GeneratorBundle(h_eff=h, kossakowski=km, superop=superop, mode=k_mode, cfg=cfg)


def derivative_at(rho, gen: GeneratorBundle) -> np.ndarray:
    """Right-hand side -i[H_eff, rho] + L[rho] of the master equation."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 matrix, got shape {rho.shape}")
    return unvec(gen.superop @ vec(rho))


def propagator(gen: GeneratorBundle, t: float) -> np.ndarray:
    return expm(gen.superop * float(t))


def choi_matrix(gen: GeneratorBundle, t: float) -> np.ndarray:
    """sum_ij |i><j| kron Phi_t(|i><j|), a 16x16 matrix PSD iff Phi_t is CP."""
    prop = propagator(gen, t)
    choi = np.zeros((16, 16), dtype=complex)
    for i in range(4):
        for j in range(4):
            e = np.zeros((4, 4), dtype=complex)
            e[i, j] = 1.0
            choi[4 * i:4 * i + 4, 4 * j:4 * j + 4] = unvec(prop @ vec(e))
    return choi


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    trace_deviation: np.ndarray
    min_eigenvalue: np.ndarray
    hermiticity_error: np.ndarray
    negativity: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.einsum("tii->ti", self.states))


def _rk4_step(l_op, y, h):
    k1 = l_op @ y
    k2 = l_op @ (y + 0.5 * h * k1)
    k3 = l_op @ (y + 0.5 * h * k2)
    k4 = l_op @ (y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk4_interval(l_op, y, span, h, tol):
    """Advance by ``span`` with step doubling; returns (y, last step)."""
    done = 0.0
    while done < span:
        h = min(h, span - done)
        full = _rk4_step(l_op, y, h)
        half = _rk4_step(l_op, _rk4_step(l_op, y, h / 2), h / 2)
        err = np.max(np.abs(half - full))
        if err <= tol or h < 1e-14 * max(span, 1.0):
            y = half + (half - full) / 15.0
            done += h
            h *= min(4.0, 0.9 * (tol / max(err, 1e-300)) ** 0.2)
        else:
            h *= max(0.1, 0.9 * (tol / err) ** 0.2)
    return y, h


def evolve(rho0, gen: GeneratorBundle, t_max: float, n_steps: int, *, method: str = "expm",
           tol: float = 1e-12) -> Trajectory:
    """States at ``n_steps + 1`` equally spaced times in [0, t_max].

    ``method="expm"`` applies the exact one-step propagator repeatedly;
    ``method="rk4"`` integrates with classical Runge-Kutta and step-doubling
    error control (absolute tolerance ``tol`` per step on the entries).
    """
    from .entanglement import negativity

    rho0 = validate_state(rho0)
    if not t_max > 0:
        raise ValidationError("t_max must be positive")
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValidationError("n_steps must be an integer >= 1")
    n_steps = int(n_steps)
    times = np.linspace(0.0, float(t_max), n_steps + 1)
    dt = times[1] - times[0]
    y = vec(rho0)
    states = [rho0.copy()]
    if method == "expm":
        step = expm(gen.superop * dt)
        for _ in range(n_steps):
            y = step @ y
            states.append(unvec(y))
    elif method == "rk4":
        h = dt / 4
        for _ in range(n_steps):
            y, h = _rk4_interval(gen.superop, y, dt, h, tol)
            states.append(unvec(y))
    else:
        raise ValidationError(f"method must be 'expm' or 'rk4', got {method!r}")
    states = np.array(states)

    trace_dev = np.abs(np.einsum("tii->t", states) - 1.0)
    herm = np.max(np.abs(states - np.conj(np.transpose(states, (0, 2, 1)))), axis=(1, 2))
    sym = 0.5 * (states + np.conj(np.transpose(states, (0, 2, 1))))
    min_eig = np.linalg.eigvalsh(sym)[:, 0]
    worst = float(np.min(min_eig))
    if worst < POSITIVITY_ERROR:
        raise NumericalContractError(f"state lost positivity: min eigenvalue {worst!r}")
    if worst < POSITIVITY_WARN:
        warnings.warn(f"state slightly non-positive: min eigenvalue {worst!r}", PositivityWarning,
                      stacklevel=2)
    neg = np.array([negativity(s, check=False) for s in sym])
    return Trajectory(times=times, states=states, trace_deviation=trace_dev,
                      min_eigenvalue=min_eig, hermiticity_error=herm, negativity=neg)
