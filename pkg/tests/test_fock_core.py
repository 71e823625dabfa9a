import math

import numpy as np
import pytest

from relqsl import fock_core
from relqsl.fock_core import (
    SpectralDecomposition,
    StateVector,
    TruncatedOperator,
    build_hamiltonian,
    build_ladder,
    build_number,
    build_quadratures,
    default_cutoff,
    diagonalize,
    evolve,
    expectation,
    variance,
)

DIM = 64

EXPECTED_CUTOFFS = {
    (0.0, 0.0): 256,
    (10.0, 0.0): 808,
    (0.0, 2.0): 1748,
}


def test_ladder_matrix_elements():
    a, adag = build_ladder(8)
    for n in range(1, 8):
        assert a.entries[n - 1, n] == pytest.approx(math.sqrt(n), rel=1e-15)
    # everything off the superdiagonal is exactly zero
    mask = np.ones((8, 8), dtype=bool)
    mask[np.arange(7), np.arange(1, 8)] = False
    assert np.all(a.entries[mask] == 0)
    assert np.array_equal(adag.entries, a.entries.conj().T)


def test_ladder_small_block():
    # top-left 3x3 block is the standard truncated annihilation matrix
    a, _ = build_ladder(8)
    block = a.entries[:3, :3]
    ref = np.array([[0, 1, 0], [0, 0, math.sqrt(2)], [0, 0, 0]], dtype=complex)
    assert np.allclose(block, ref, atol=0, rtol=1e-15)


def test_commutator_is_identity_in_interior():
    a, adag = build_ladder(DIM)
    comm = a.entries @ adag.entries - adag.entries @ a.entries
    assert np.allclose(comm[: DIM - 1, : DIM - 1], np.eye(DIM - 1), atol=1e-12)
    # the last diagonal entry is the truncation artifact
    assert comm[DIM - 1, DIM - 1] == pytest.approx(1 - DIM)


def test_quadratures_hermitian_and_canonical():
    x, p = build_quadratures(DIM)
    assert x.is_hermitian()
    assert p.is_hermitian()
    comm = x.entries @ p.entries - p.entries @ x.entries
    assert np.allclose(comm[: DIM - 1, : DIM - 1], 1j * np.eye(DIM - 1), atol=1e-12)


def test_number_operator():
    n = build_number(DIM)
    assert np.array_equal(np.diag(n.entries).real, np.arange(DIM))


def test_harmonic_spectrum_at_zero_epsilon():
    spec = diagonalize(build_hamiltonian(DIM, 0.0))
    interior = DIM // 4
    assert np.allclose(spec.eigenvalues[:interior], np.arange(interior) + 0.5, atol=1e-10)


def test_hamiltonian_hermitian_with_correction():
    h = build_hamiltonian(DIM, 0.01)
    assert h.is_hermitian()


def test_epsilon_validation():
    with pytest.raises(ValueError):
        build_hamiltonian(DIM, -1e-6)
    with pytest.warns(UserWarning):
        build_hamiltonian(DIM, 0.2)


def test_min_dim_enforced():
    with pytest.raises(ValueError):
        build_ladder(7)
    with pytest.raises(ValueError):
        TruncatedOperator(4, np.zeros((4, 4), dtype=complex))


def test_state_vector_norm_check():
    amps = np.zeros(DIM, dtype=complex)
    amps[0] = 0.9
    with pytest.raises(ValueError):
        StateVector(DIM, amps)


def test_spectral_decomposition_requires_sorted():
    w = np.array([1.0, 0.5] + [2.0] * (DIM - 2))
    with pytest.raises(ValueError):
        SpectralDecomposition(DIM, w, np.eye(DIM, dtype=complex))


def test_diagonalize_rejects_non_hermitian():
    m = np.zeros((DIM, DIM), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(ValueError):
        diagonalize(TruncatedOperator(DIM, m))


def test_evolution_phase_of_eigenstate():
    """exp(-iHt) applied to the ground state is a pure phase e^{-i E0 t}."""
    spec = diagonalize(build_hamiltonian(DIM, 0.0))
    amps = np.zeros(DIM, dtype=complex)
    amps[0] = 1.0
    state = StateVector(DIM, amps)
    t = 1.7
    out = evolve(state, spec, t)
    overlap = complex(np.vdot(state.amps, out.amps))
    assert abs(overlap) == pytest.approx(1.0, abs=1e-12)
    assert overlap == pytest.approx(np.exp(-1j * 0.5 * t), abs=1e-10)


def test_expectation_and_variance_on_ground_state():
    h = build_hamiltonian(DIM, 0.0)
    amps = np.zeros(DIM, dtype=complex)
    amps[0] = 1.0
    state = StateVector(DIM, amps)
    assert expectation(h, state).real == pytest.approx(0.5, abs=1e-12)
    assert variance(h, state) == pytest.approx(0.0, abs=1e-12)


def test_variance_requires_hermitian():
    a, _ = build_ladder(DIM)
    amps = np.zeros(DIM, dtype=complex)
    amps[0] = 1.0
    with pytest.raises(ValueError):
        variance(a, StateVector(DIM, amps))


def test_dimension_mismatch_raises():
    h = build_hamiltonian(DIM, 0.0)
    amps = np.zeros(2 * DIM, dtype=complex)
    amps[0] = 1.0
    with pytest.raises(ValueError):
        expectation(h, StateVector(2 * DIM, amps))


def test_default_cutoff_policy():
    for (alpha0, r), expected in EXPECTED_CUTOFFS.items():
        assert default_cutoff(alpha0=alpha0, r=r) == expected


def test_module_constants():
    assert fock_core.MIN_DIM == 8
    assert fock_core.EPSILON_WARN_THRESHOLD == 0.1
