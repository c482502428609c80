import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgme.core import NumericalContractError, SystemConfig, ValidationError, bell_state, pauli_embed, product_state
from cgme.dynamics import (
    PositivityWarning,
    build_generator,
    choi_matrix,
    commutator_superop,
    derivative_at,
    dissipator_superop,
    evolve,
    propagator,
    unvec,
    vec,
)

JUMPS = [pauli_embed(alpha, i) for alpha in (1, 2) for i in (1, 2, 3)]
BASE = SystemConfig(1.0, 1.3, 0.4, 0.5, 2.0, lam=0.3)
EXACT = SystemConfig(1.0, 1.3, 0.4, 0.5, 2.0, lam=0.3, n=(0.6, 0.0, 0.8), epsilon=0.2)


def random_state(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_vec_roundtrip_and_convention():
    rng = np.random.default_rng(0)
    a, x, b = (rng.normal(size=(4, 4)) for _ in range(3))
    assert np.allclose(unvec(vec(x)), x)
    assert np.allclose(np.kron(b.T, a) @ vec(x), vec(a @ x @ b))


def test_superoperators_match_matrix_arithmetic():
    rng = np.random.default_rng(1)
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + h.conj().T
    g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    c = g @ g.conj().T
    rho = random_state(rng)
    direct = -1j * (h @ rho - rho @ h)
    assert np.allclose(unvec(commutator_superop(h) @ vec(rho)), direct)
    direct = sum(c[a, b] * (JUMPS[b] @ rho @ JUMPS[a] - 0.5 * (JUMPS[a] @ JUMPS[b] @ rho + rho @ JUMPS[a] @ JUMPS[b]))
                 for a in range(6) for b in range(6))
    assert np.allclose(unvec(dissipator_superop(c) @ vec(rho)), direct)


@pytest.mark.parametrize("cfg,mode", [(BASE, "highT"), (EXACT, "exact")])
def test_generator_preserves_trace_and_hermiticity(cfg, mode):
    gen = build_generator(cfg, mode)
    rng = np.random.default_rng(2)
    for _ in range(5):
        d = derivative_at(random_state(rng), gen)
        assert abs(np.trace(d)) <= 1e-12
        assert np.max(np.abs(d - d.conj().T)) <= 1e-12


def test_zero_coupling_is_unitary():
    gen = build_generator(BASE.replace(lam=0.0))
    spectrum = np.linalg.eigvals(gen.superop)
    assert np.allclose(spectrum.real, 0, atol=1e-14)
    traj = evolve(product_state(np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)), gen, 10.0, 20)
    assert np.allclose(traj.populations, traj.populations[0], atol=1e-12)


def test_semigroup_property():
    gen = build_generator(BASE)
    assert np.allclose(propagator(gen, 0.7) @ propagator(gen, 1.1), propagator(gen, 1.8), atol=1e-12)


@pytest.mark.parametrize("t", [1e-3, 0.1, 1.0])
def test_exact_choi_matrix_is_positive(t):
    choi = choi_matrix(build_generator(EXACT, "exact"), t)
    assert np.allclose(choi, choi.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(choi)[0] >= -1e-8
    # trace preservation: partial trace over the output is the identity
    assert np.allclose(np.einsum("iaja->ij", choi.reshape(4, 4, 4, 4)), np.eye(4), atol=1e-12)


def test_rk4_agrees_with_propagator():
    gen = build_generator(BASE)
    rho0 = bell_state()
    a = evolve(rho0, gen, 5.0, 10, method="expm")
    b = evolve(rho0, gen, 5.0, 10, method="rk4", tol=1e-12)
    assert np.max(np.abs(a.states - b.states)) <= 1e-9


def test_derivative_matches_finite_difference():
    gen = build_generator(BASE)
    rho0 = product_state([0, 1], [1, 0])
    h = 1e-5
    plus = unvec(propagator(gen, h) @ vec(rho0))
    minus = unvec(propagator(gen, -h) @ vec(rho0))
    assert np.allclose((plus - minus) / (2 * h), derivative_at(rho0, gen), atol=1e-8)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.2, 2.0), st.floats(0.05, 1.0), st.sampled_from(["expm", "rk4"]))
def test_trajectory_diagnostics(w1, w2, frac, method):
    cfg = SystemConfig(w1, w2, frac * 2.0, 0.5, 2.0, lam=0.3)
    traj = evolve(product_state([0, 1], np.array([1, 1]) / np.sqrt(2)), build_generator(cfg), 20.0, 10, method=method)
    assert np.max(traj.trace_deviation) <= 1e-9
    assert np.max(traj.hermiticity_error) <= 1e-9
    assert traj.states.shape == (11, 4, 4)
    assert traj.negativity.shape == (11,)


def test_positivity_guard():
    gen = build_generator(BASE)
    # a negative "state" cannot be validated in the first place
    with pytest.raises(ValidationError):
        evolve(np.diag([1.1, -0.1, 0, 0]), gen, 1.0, 2)
    # an amplifying generator drives the state out of the cone
    bad = type(gen)(h_eff=gen.h_eff, kossakowski=gen.kossakowski, superop=-gen.superop, mode=gen.mode)
    with pytest.raises(NumericalContractError):
        evolve(product_state([1, 0], [1, 0]), bad, 20.0, 5)


def test_small_violation_warns():
    gen = build_generator(BASE)
    # trace-preserving flow that moves population out of an empty level at rate 1e-7
    superop = np.zeros((16, 16), dtype=complex)
    superop[0, 0], superop[5, 0] = 1e-7, -1e-7
    leaky = type(gen)(h_eff=gen.h_eff, kossakowski=gen.kossakowski, superop=superop, mode=gen.mode)
    with pytest.warns(PositivityWarning):
        traj = evolve(product_state([1, 0], [1, 0]), leaky, 1.0, 2)
    assert -1e-6 < traj.min_eigenvalue[-1] < -1e-8


def test_argument_validation():
    gen = build_generator(BASE)
    with pytest.raises(ValidationError):
        evolve(bell_state(), gen, 0.0, 2)
    with pytest.raises(ValidationError):
        evolve(bell_state(), gen, 1.0, 0)
    with pytest.raises(ValidationError):
        evolve(bell_state(), gen, 1.0, 2, method="euler")
    with pytest.raises(ValidationError):
        build_generator(BASE, "bogus")
    with pytest.raises(ValidationError):
        derivative_at(np.eye(2), gen)


@pytest.mark.parametrize("params", [(1.0, 1.3, 0.4, 0.5, 2.0), (1.1, 1.0, 0.1, 1.0, 1.0), (1.9, 1.0, 0.5, 1.0, 2.0)])
def test_high_temperature_trajectories_stay_positive(params):
    # the approximate high-temperature matrix can have slightly negative eigenvalues
    # (third case); the states along the trajectory still stay within the warning band
    cfg = SystemConfig(*params, lam=0.3)
    gen = build_generator(cfg)
    for rho0 in (product_state([0, 1], [1, 0]), bell_state(), np.eye(4) / 4):
        traj = evolve(rho0, gen, 10.0 / cfg.lam**2, 50)
        assert np.min(traj.min_eigenvalue) >= -1e-8
        assert np.max(traj.trace_deviation) <= 1e-9
