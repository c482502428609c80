"""Partial transposition and the entanglement-generation criteria.

For an initial product state |phi> (x) |psi> the partial transpose of the
generator output, restricted to the two vectors |phi_perp psi*> and
|phi psi*_perp>, is the 2x2 matrix

    [[ <u|C11|u>,          -<u|Re C12 - iH|v>* ],
     [ -<u|Re C12 - iH|v>,  <v|C22^T|v>        ]]

with probe vectors u_i = <phi_perp|sigma_i|phi>, v_i = <psi|sigma_i|psi_perp>
and ``Re`` the entrywise real part. Entanglement is created at t = 0+ exactly
when this block has a negative eigenvalue, which gives the general test
``<u|C11|u> <v|C22^T|v> < |<u|Re C12 - iH|v>|^2``. The remaining criteria are
its high-temperature, equal-frequency, short-distance and long-interval
specializations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .core import KET_MINUS, KET_PLUS, SystemConfig, ValidationError, PAULI, product_state, sinc, validate_state
from .effective_hamiltonian import induced_j, induced_coupling
from .kossakowski import integral_triple, kossakowski_matrix

__all__ = [
    "CriterionReport",
    "ProbeVectors",
    "partial_transpose",
    "negativity",
    "orthocomplement",
    "probe_vectors",
    "criterion_full",
    "criterion_highT",
    "criterion_equal",
    "criterion_smallL",
    "criterion_largeDt",
    "da_dt0",
    "optimal_chi",
    "find_boundary",
    "CRITERIA",
    "CRITERION_ALIASES",
    "initial_product",
]


@dataclass(frozen=True)
class CriterionReport:
    criterion_id: str
    lhs: float
    rhs: float
    inputs: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return bool(self.rhs > self.lhs)

    @property
    def margin(self) -> float:
        return float(self.rhs - self.lhs)


class ProbeVectors(NamedTuple):
    u: np.ndarray
    v: np.ndarray


def _inputs(cfg: SystemConfig, **extra) -> dict:
    out = dict(omega1=cfg.omega1, omega2=cfg.omega2, ell=cfg.ell, beta=cfg.beta,
               delta_t=cfg.delta_t, lam=cfg.lam)
    out.update(extra)
    return out


# -- partial transposition ----------------------------------------------------

def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second qubit."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 matrix, got shape {rho.shape}")
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def negativity(rho, *, check: bool = True) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    if check:
        rho = validate_state(rho)
    pt = partial_transpose(rho)
    eig = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(-np.sum(eig[eig < 0]))


# -- probe vectors ------------------------------------------------------------

def _normalized(ket, name):
    ket = np.asarray(ket, dtype=complex)
    if ket.shape != (2,) or abs(np.vdot(ket, ket) - 1.0) > 1e-12:
        raise ValidationError(f"{name} must be a normalized 2-vector")
    return ket


def orthocomplement(ket) -> np.ndarray:
    """Unit vector orthogonal to ``ket`` whose first nonzero entry is real positive."""
    ket = _normalized(ket, "ket")
    perp = np.array([-np.conj(ket[1]), np.conj(ket[0])])
    lead = perp[0] if abs(perp[0]) > 1e-14 else perp[1]
    return perp * (abs(lead) / lead)


def probe_vectors(phi, psi) -> ProbeVectors:
    """u_i = <phi_perp|sigma_i|phi> and v_i = <psi|sigma_i|psi_perp>."""
    phi = _normalized(phi, "phi")
    psi = _normalized(psi, "psi")
    phi_p, psi_p = orthocomplement(phi), orthocomplement(psi)
    u = np.array([np.vdot(phi_p, s @ phi) for s in PAULI])
    v = np.array([np.vdot(psi, s @ psi_p) for s in PAULI])
    return ProbeVectors(u, v)


# -- criteria -----------------------------------------------------------------

def criterion_full(cfg: SystemConfig, u=None, v=None, mode: str = "highT", *,
                   phi=KET_MINUS, psi=KET_PLUS, kernel: str = "thermal",
                   tol: float = 1e-10) -> CriterionReport:
    """General test built from the Kossakowski blocks and the induced coupling.

    ``u`` and ``v`` default to the probe vectors of ``phi`` (x) ``psi``.
    The dissipative and Hamiltonian parts of the right-hand side are also
    reported separately in ``extras``.
    """
    if (u is None) != (v is None):
        raise ValidationError("give both u and v, or neither")
    if u is None:
        u, v = probe_vectors(phi, psi)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != (3,) or v.shape != (3,):
        raise ValidationError("probe vectors must be complex 3-vectors")
    k_mode = "exact" if mode == "exact" else "highT"
    km = kossakowski_matrix(cfg, k_mode, kernel=kernel, tol=tol)
    if cfg.ell > 0:
        h12 = induced_coupling(cfg, "exact" if mode == "exact" else "closed", tol=tol).h12
    else:
        h12 = np.zeros((3, 3))
    d1 = np.vdot(u, km.block(1, 1) @ u).real
    d2 = np.vdot(v, km.block(2, 2).T @ v).real
    re12 = km.block(1, 2).real
    dissipative = np.vdot(u, re12 @ v)
    hamiltonian = np.vdot(u, h12 @ v)
    rhs = abs(dissipative - 1j * hamiltonian) ** 2
    return CriterionReport(
        "full", float(d1 * d2), float(rhs),
        _inputs(cfg, mode=k_mode),
        dict(c11=float(d1), c22=float(d2),
             dissipative=float(abs(dissipative) ** 2), hamiltonian=float(abs(hamiltonian) ** 2)),
    )


def _thermal_lhs(cfg):
    return (1 - cfg.beta * cfg.omega1 / 2) * (1 + cfg.beta * cfg.omega2 / 2)


def criterion_highT(cfg: SystemConfig) -> CriterionReport:
    """(1 - b w1/2)(1 + b w2/2) < pi^2 b^2 [I_+^2 + 4 J_+^2].

    The inequality is written for I_+ normalized as twice the integral of the
    dissipator; that factor is applied here so the test agrees with
    :func:`criterion_full`.
    """
    cfg.require_high_temperature()
    cfg.require_closed_form()
    if not cfg.ell > 0:
        raise ValidationError("the high-temperature criterion needs ell > 0")
    i_plus = 2.0 * integral_triple((1, 2), cfg, "highT").i_plus
    j_plus, _ = induced_j(cfg, "closed")
    scale = (math.pi * cfg.beta) ** 2
    return CriterionReport(
        "highT", _thermal_lhs(cfg), scale * (i_plus**2 + 4 * j_plus**2),
        _inputs(cfg), dict(i_plus=i_plus, j_plus=j_plus,
                           dissipative=scale * i_plus**2, hamiltonian=scale * 4 * j_plus**2),
    )


def criterion_equal(cfg: SystemConfig, *, rtol: float = 1e-12) -> CriterionReport:
    """1 - (b w/2)^2 < sinc(w ell)^2 + (b^2/4) (cos(w ell)/ell)^2, for w1 = w2.

    This is the long-interval form for identical atoms; it does not depend on
    delta_t.
    """
    if abs(cfg.omega1 - cfg.omega2) > rtol * max(cfg.omega1, cfg.omega2):
        raise ValidationError("criterion_equal requires omega1 == omega2")
    if not (cfg.ell > 0 and math.isfinite(cfg.beta)):
        raise ValidationError("criterion_equal needs ell > 0 and finite beta")
    w, b, ell = cfg.omega1, cfg.beta, cfg.ell
    lhs = 1 - (b * w / 2) ** 2
    rhs = sinc(w * ell) ** 2 + (b**2 / 4) * (math.cos(w * ell) / ell) ** 2
    return CriterionReport("equal", lhs, rhs, _inputs(cfg))


def criterion_smallL(cfg: SystemConfig) -> CriterionReport:
    """(1 - b w1/2)(1 + b w2/2) < sinc(w12 dt/2)^2 - (ell/dt) sinc(w12 dt), first order in ell."""
    cfg.require_high_temperature()
    cfg.require_closed_form()
    x = cfg.omega12 * cfg.delta_t
    rhs = sinc(x / 2) ** 2 - cfg.ell / cfg.delta_t * sinc(x)
    return CriterionReport("smallL", _thermal_lhs(cfg), rhs, _inputs(cfg))


def criterion_largeDt(cfg: SystemConfig, *, degenerate_tol: float = 1e-12) -> CriterionReport:
    """(1 - R1)(1 + R2) < (1/4) sinc(w12 dt/2)^2 [sqrt(w1 R2/(w2 R1)) S1 + sqrt(w2 R1/(w1 R2)) S2]^2

    with R = tanh(beta w/2) and S = sinc(w ell). The Hamiltonian part is
    neglected. When a sinc factor vanishes the right-hand side is identically
    zero; such measure-zero points are flagged with ``extras["degenerate"]``.
    """
    w1, w2 = cfg.omega1, cfg.omega2
    r1 = math.tanh(cfg.beta * w1 / 2)
    r2 = math.tanh(cfg.beta * w2 / 2)
    s1, s2 = sinc(w1 * cfg.ell), sinc(w2 * cfg.ell)
    time_factor = sinc(cfg.omega12 * cfg.delta_t / 2)
    bracket = math.sqrt(w1 * r2 / (w2 * r1)) * s1 + math.sqrt(w2 * r1 / (w1 * r2)) * s2
    rhs = 0.25 * time_factor**2 * bracket**2
    lhs = (1 - r1) * (1 + r2)
    degenerate = abs(time_factor) < degenerate_tol or abs(bracket) < degenerate_tol
    extras = dict(R1=r1, R2=r2, S1=s1, S2=s2, degenerate=degenerate)
    if degenerate:
        extras["note"] = "right-hand side vanishes at a zero of a sinc factor"
    return CriterionReport("largeDt", lhs, rhs, _inputs(cfg), extras)


CRITERIA = {
    "full": criterion_full,
    "highT": criterion_highT,
    "equal": criterion_equal,
    "smallL": criterion_smallL,
    "largeDt": criterion_largeDt,
}
# alternative selector names accepted by the command line
CRITERION_ALIASES = {"eq47": "full", "eq49": "highT", "eq50": "equal", "eq51": "smallL", "eq52": "largeDt"}


# -- direct probe of the initial slope ------------------------------------------

def _generator(cfg, mode, gen, kernel, tol):
    from .dynamics import build_generator

    if gen is None:
        gen = build_generator(cfg, mode, kernel=kernel, tol=tol)
    return gen


def da_dt0(cfg: SystemConfig, rho0, chi, mode: str = "highT", *, gen=None,
           kernel: str = "thermal", tol: float = 1e-10) -> float:
    """Initial slope <chi| PT(d rho/dt) |chi> of the partially transposed state.

    ``chi`` must satisfy <chi|PT(rho0)|chi> = 0, so that the average starts
    at zero and a negative slope signals entanglement creation.
    """
    from .dynamics import derivative_at

    rho0 = validate_state(rho0)
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (4,) or not np.vdot(chi, chi).real > 0:
        raise ValidationError("chi must be a nonzero 4-vector")
    chi = chi / np.linalg.norm(chi)
    start = np.vdot(chi, partial_transpose(rho0) @ chi).real
    if abs(start) > 1e-12:
        raise ValidationError(f"chi does not annihilate PT(rho0): <chi|PT(rho0)|chi> = {start!r}")
    gen = _generator(cfg, mode, gen, kernel, tol)
    slope = partial_transpose(derivative_at(rho0, gen))
    return float(np.vdot(chi, slope @ chi).real)


def optimal_chi(cfg: SystemConfig, rho0, mode: str = "highT", *, gen=None,
                kernel: str = "thermal", tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Vector minimizing :func:`da_dt0`, and the minimum.

    The minimum over unit chi in the kernel of PT(rho0) is the lowest
    eigenvalue of PT(d rho/dt) compressed onto that kernel.
    """
    from .dynamics import derivative_at

    rho0 = validate_state(rho0)
    gen = _generator(cfg, mode, gen, kernel, tol)
    pt0 = partial_transpose(rho0)
    w, vecs = np.linalg.eigh(0.5 * (pt0 + pt0.conj().T))
    basis = vecs[:, np.abs(w) <= 1e-12]
    if basis.shape[1] == 0:
        raise ValidationError("PT(rho0) has no kernel; the slope test does not apply")
    slope = partial_transpose(derivative_at(rho0, gen))
    small = basis.conj().T @ slope @ basis
    ev, ew = np.linalg.eigh(0.5 * (small + small.conj().T))
    chi = basis @ ew[:, 0]
    return chi, float(ev[0])


def find_boundary(margin: Callable[[float], float], lo: float, hi: float, *,
                  iterations: int = 60) -> float:
    """Bisect a sign change of ``margin`` on [lo, hi].

    ``margin`` may return a number or a :class:`CriterionReport` (its margin
    is used). Raises when the endpoints do not bracket a sign change.
    """
    def value(x):
        out = margin(x)
        return out.margin if isinstance(out, CriterionReport) else float(out)

    f_lo, f_hi = value(lo), value(hi)
    if (f_lo > 0) == (f_hi > 0):
        raise ValidationError(f"no sign change on [{lo}, {hi}] ({f_lo!r}, {f_hi!r})")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = value(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def initial_product(phi=KET_MINUS, psi=KET_PLUS) -> np.ndarray:
    return product_state(phi, psi)
