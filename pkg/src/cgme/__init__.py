"""Coarse-grained master equation for two atoms in a thermal scalar-field bath."""

from .core import (
    CGMEError,
    NumericalContractError,
    SystemConfig,
    ValidationError,
    bell_state,
    product_state,
    psi_tensor,
    system_hamiltonian,
)
from .dynamics import build_generator, evolve
from .effective_hamiltonian import effective_hamiltonian, induced_j
from .entanglement import (
    criterion_equal,
    criterion_full,
    criterion_highT,
    criterion_largeDt,
    criterion_smallL,
    negativity,
    partial_transpose,
)
from .kossakowski import integral_triple, kossakowski_matrix

__version__ = "0.1.0"

__all__ = [
    "CGMEError",
    "NumericalContractError",
    "SystemConfig",
    "ValidationError",
    "bell_state",
    "build_generator",
    "criterion_equal",
    "criterion_full",
    "criterion_highT",
    "criterion_largeDt",
    "criterion_smallL",
    "effective_hamiltonian",
    "evolve",
    "induced_j",
    "integral_triple",
    "kossakowski_matrix",
    "negativity",
    "partial_transpose",
    "product_state",
    "psi_tensor",
    "system_hamiltonian",
]
