"""Physical parameters, Pauli algebra and the free-evolution tensors.

Conventions used throughout the package:

* natural units, hbar = c = k_B = 1;
* the computational basis of each atom is the sigma_3 eigenbasis ordered
  ``(|+>, |->)`` with ``sigma_3 |+-> = +-|+->``;
* two-atom operators act on ``atom1 (x) atom2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CGMEError",
    "ValidationError",
    "NumericalContractError",
    "SystemConfig",
    "PAULI",
    "IDENTITY2",
    "KET_PLUS",
    "KET_MINUS",
    "LEVI_CIVITA",
    "sinc",
    "psi_tensor",
    "pauli_embed",
    "system_hamiltonian",
    "validate_state",
    "product_state",
    "bell_state",
]


class CGMEError(Exception):
    """Base class for package errors."""


class ValidationError(CGMEError, ValueError):
    """Invalid input or violated precondition."""


class NumericalContractError(CGMEError, ArithmeticError):
    """A numerical guarantee (positivity, convergence, ...) failed."""


IDENTITY2 = np.eye(2, dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
KET_PLUS = np.array([1.0, 0.0], dtype=complex)
KET_MINUS = np.array([0.0, 1.0], dtype=complex)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_j, _i, _k] = -1.0


def sinc(x):
    """Unnormalized sinc, sin(x)/x, with the value 1 at the origin."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(xs) / xs)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SystemConfig:
    """Parameters of two atoms coupled to a thermal scalar-field bath.

    ``lam`` is the coupling constant (``"lambda"`` in JSON configs) and
    ``beta`` may be ``math.inf`` for the field vacuum. ``epsilon`` is the
    atom size; it only enters the ``exact`` Kossakowski path, where it is
    the ultraviolet regulator exp(-epsilon |omega|) of the smeared field.
    """

    omega1: float
    omega2: float
    ell: float
    beta: float
    delta_t: float
    lam: float = 0.1
    n: tuple = (0.0, 0.0, 1.0)
    epsilon: float = 0.0
    _nvec: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("omega1", "omega2", "ell", "beta", "delta_t", "lam", "epsilon"):
            value = float(getattr(self, name))
            if math.isnan(value):
                raise ValidationError(f"{name} is NaN")
            object.__setattr__(self, name, value)
        n = np.asarray(self.n, dtype=float)
        if n.shape != (3,) or not np.all(np.isfinite(n)):
            raise ValidationError("n must be a finite real 3-vector")
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValidationError(f"n must be a unit vector, |n| = {np.linalg.norm(n)!r}")
        object.__setattr__(self, "n", tuple(float(c) for c in n))
        object.__setattr__(self, "_nvec", n)
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValidationError("atomic gaps omega1, omega2 must be positive")
        if not (math.isfinite(self.omega1) and math.isfinite(self.omega2)):
            raise ValidationError("atomic gaps must be finite")
        if not (0 < self.delta_t < math.inf):
            raise ValidationError("delta_t must be positive and finite")
        if not (0 <= self.ell < math.inf):
            raise ValidationError("ell must be non-negative and finite")
        if not self.beta > 0:
            raise ValidationError("beta must be positive (inf allowed)")
        if not (0 <= self.lam < math.inf):
            raise ValidationError("lam must be non-negative and finite")
        if not (0 <= self.epsilon < math.inf):
            raise ValidationError("epsilon must be non-negative and finite")

    @property
    def nvec(self) -> np.ndarray:
        return self._nvec.copy()

    @property
    def omega12(self) -> float:
        return self.omega1 - self.omega2

    def omega(self, atom: int) -> float:
        if atom == 1:
            return self.omega1
        if atom == 2:
            return self.omega2
        raise ValidationError(f"atom index must be 1 or 2, got {atom!r}")

    def separation(self, alpha: int, beta: int) -> float:
        """Distance between atoms alpha and beta (0 for the same atom)."""
        self.omega(alpha), self.omega(beta)
        return 0.0 if alpha == beta else self.ell

    def require_high_temperature(self):
        if not math.isfinite(self.beta):
            raise ValidationError("high-temperature formulas need a finite beta")
        worst = self.beta * max(self.omega1, self.omega2) / 2.0
        if worst > 1.0:
            raise ValidationError(
                f"high-temperature mode requires beta*omega/2 <= 1, got {worst:.6g}"
            )

    def require_closed_form(self):
        if self.ell > self.delta_t:
            raise ValidationError(
                f"closed forms require ell <= delta_t (ell={self.ell}, delta_t={self.delta_t})"
            )

    def replace(self, **changes) -> "SystemConfig":
        data = {
            k: getattr(self, k)
            for k in ("omega1", "omega2", "ell", "beta", "delta_t", "lam", "n", "epsilon")
        }
        data.update(changes)
        return SystemConfig(**data)


_XI_LABELS = {"+": 1, "-": -1, "0": 0, 1: 1, -1: -1, 0: 0, "−": -1}


def _unit(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValidationError("n must be a unit 3-vector")
    return n


def psi_tensor(xi, n) -> np.ndarray:
    """Tensor psi^(xi) splitting sigma_i(t) into frequency components.

    ``sigma_i(t) = sum_xi sum_j exp(i xi omega t) psi^(xi)_ij sigma_j`` for
    the single-atom Hamiltonian (omega/2) n.sigma.
    """
    try:
        xi = _XI_LABELS[xi]
    except (KeyError, TypeError):
        raise ValidationError(f"xi must be one of +, -, 0; got {xi!r}") from None
    n = _unit(n)
    nn = np.outer(n, n)
    if xi == 0:
        return nn.astype(complex)
    eps_n = np.einsum("ijk,k->ij", LEVI_CIVITA, n)
    return 0.5 * (np.eye(3) - nn + xi * 1j * eps_n)


def pauli_embed(atom: int, i: int) -> np.ndarray:
    """sigma_i acting on ``atom`` (1 or 2) inside the two-atom space; i in 1..3."""
    if i not in (1, 2, 3):
        raise ValidationError(f"Pauli index must be 1, 2 or 3, got {i!r}")
    if atom == 1:
        return np.kron(PAULI[i - 1], IDENTITY2)
    if atom == 2:
        return np.kron(IDENTITY2, PAULI[i - 1])
    raise ValidationError(f"atom index must be 1 or 2, got {atom!r}")


def system_hamiltonian(cfg: SystemConfig) -> np.ndarray:
    n = cfg.nvec
    h = np.zeros((4, 4), dtype=complex)
    for i in range(3):
        h += 0.5 * n[i] * (cfg.omega1 * pauli_embed(1, i + 1) + cfg.omega2 * pauli_embed(2, i + 1))
    return h


def validate_state(rho, *, herm_tol=1e-12, trace_tol=1e-12, psd_tol=1e-10) -> np.ndarray:
    """Return ``rho`` as a complex 4x4 array after checking it is a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError(f"two-qubit state must be 4x4, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ValidationError("state is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise ValidationError(f"state trace is {np.trace(rho).real!r}, expected 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lo < -psd_tol:
        raise ValidationError(f"state has negative eigenvalue {lo!r}")
    return rho


def product_state(phi, psi) -> np.ndarray:
    """|phi><phi| (x) |psi><psi| for normalized single-qubit kets."""
    phi = np.asarray(phi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    for name, ket in (("phi", phi), ("psi", psi)):
        if ket.shape != (2,) or abs(np.vdot(ket, ket) - 1.0) > 1e-12:
            raise ValidationError(f"{name} must be a normalized 2-vector")
    ket = np.kron(phi, psi)
    return np.outer(ket, ket.conj())


def bell_state() -> np.ndarray:
    """(|++> + |-->)/sqrt(2) in the sigma_3 product basis."""
    ket = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return np.outer(ket, ket.conj())
