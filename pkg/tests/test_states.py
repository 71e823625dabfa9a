import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relqsl.qsl_bounds import coherent_fidelity_closed, squeezed_fidelity_closed
from relqsl.states import (
    CoherentSpec,
    SqueezeSpec,
    coherent_amplitudes,
    coherent_overlap_numeric,
    coherent_tail,
    mean_photon_squeezed,
    squeezed_coeffs,
    squeezed_coeffs_closed,
    squeezed_overlap_numeric,
    squeezed_pair_tail,
    squeezed_state,
)

DIM = 256

# overlap moduli pinned against the pair-index Fock propagation
EXPECTED_OVERLAPS = {
    ("coherent", 1.0, 1.0, 0.0): 0.6314745151064698,
    ("squeezed", 0.3, 1.0, 0.0): 0.9779770365590911,
    ("squeezed", 0.3, 1.0, 1e-4): 0.9779785574400698,
}


def test_spec_validation():
    with pytest.raises(ValueError):
        CoherentSpec(-0.1)
    with pytest.raises(ValueError):
        SqueezeSpec(-0.5)


def test_coherent_amplitudes_poissonian():
    state = coherent_amplitudes(CoherentSpec(1.0), DIM)
    assert state.amps[0] == pytest.approx(math.exp(-0.5), rel=1e-14)
    assert state.amps[2] == pytest.approx(math.exp(-0.5) / math.sqrt(2.0), rel=1e-14)
    assert np.linalg.norm(state.amps) == pytest.approx(1.0, abs=1e-12)


def test_coherent_phase_convention():
    theta = 0.7
    state = coherent_amplitudes(CoherentSpec(1.2, theta), DIM)
    flat = coherent_amplitudes(CoherentSpec(1.2), DIM)
    ns = np.arange(DIM)
    assert np.allclose(state.amps, flat.amps * np.exp(1j * theta * ns), atol=1e-14)


def test_coherent_vacuum():
    state = coherent_amplitudes(CoherentSpec(0.0), DIM)
    assert state.amps[0] == 1.0
    assert np.all(state.amps[1:] == 0)
    assert coherent_tail(0.0, DIM) == 0.0


def test_coherent_cutoff_guards():
    with pytest.raises(ValueError, match="use dim >="):
        coherent_amplitudes(CoherentSpec(2.0), 8)
    with pytest.raises(ValueError, match="cap"):
        coherent_amplitudes(CoherentSpec(31.0), 16384)


def test_squeezed_coeff_recursion_vs_closed_form():
    for r in (0.1, 0.5, 1.2):
        rec = squeezed_coeffs(SqueezeSpec(r), 64)
        closed = squeezed_coeffs_closed(SqueezeSpec(r), 64)
        assert np.allclose(rec, closed, rtol=1e-13, atol=1e-300)


def test_squeezed_coeffs_validation():
    with pytest.raises(ValueError):
        squeezed_coeffs(SqueezeSpec(5.0), 32)
    with pytest.raises(ValueError):
        squeezed_coeffs(SqueezeSpec(0.5), 0)
    with pytest.raises(ValueError):
        squeezed_coeffs_closed(SqueezeSpec(0.5, theta=0.3), 32)


def test_squeezed_state_structure():
    state = squeezed_state(SqueezeSpec(0.5), DIM)
    assert np.all(state.amps[1::2] == 0)
    assert np.linalg.norm(state.amps) == pytest.approx(1.0, abs=1e-12)
    assert state.amps[0] == pytest.approx(1.0 / math.sqrt(math.cosh(0.5)), rel=1e-14)


def test_squeezed_tail_control():
    assert squeezed_pair_tail(SqueezeSpec(0.5), DIM // 2) <= 1e-12
    with pytest.raises(ValueError, match="tail"):
        squeezed_state(SqueezeSpec(2.5), 16)


def test_overlap_frozen_points():
    for (kind, par, t, eps), expected in EXPECTED_OVERLAPS.items():
        if kind == "coherent":
            got = abs(coherent_overlap_numeric(CoherentSpec(par), t, eps, DIM))
        else:
            got = abs(squeezed_overlap_numeric(SqueezeSpec(par), t, eps, DIM))
        assert got == pytest.approx(expected, rel=1e-12)


def test_overlap_is_one_at_t_zero():
    assert coherent_overlap_numeric(CoherentSpec(1.5), 0.0, 1e-3, DIM) == pytest.approx(1.0)
    assert squeezed_overlap_numeric(SqueezeSpec(0.8), 0.0, 1e-3, DIM) == pytest.approx(1.0)


def test_coherent_overlap_matches_closed_form_at_zero_epsilon():
    """Uncorrected Poisson overlap equals exp(a0^2 (cos t - 1)) pointwise."""
    for alpha0 in (0.5, 1.0, 2.0):
        for t in (0.3, 1.0, 2.7, 5.5):
            got = abs(coherent_overlap_numeric(CoherentSpec(alpha0), t, 0.0, DIM))
            assert got == pytest.approx(coherent_fidelity_closed(alpha0, t, 0.0), abs=1e-13)


def test_squeezed_overlap_matches_closed_form_at_zero_epsilon():
    for r in (0.2, 0.5, 1.0):
        for t in (0.3, 1.0, 2.7):
            got = abs(squeezed_overlap_numeric(SqueezeSpec(r), t, 0.0, DIM))
            assert got == pytest.approx(squeezed_fidelity_closed(r, t, 0.0), abs=1e-13)


def test_overlap_periodicity_at_zero_epsilon():
    # the 1/2 ground-state energy contributes a global e^{-i t / 2}: a 2 pi
    # shift flips the sign of the overlap and leaves its modulus unchanged
    t = 1.3
    a = coherent_overlap_numeric(CoherentSpec(1.0), t, 0.0, DIM)
    b = coherent_overlap_numeric(CoherentSpec(1.0), t + 2.0 * math.pi, 0.0, DIM)
    assert a == pytest.approx(-b, abs=1e-10)
    assert abs(a) == pytest.approx(abs(b), abs=1e-12)
    c = squeezed_overlap_numeric(SqueezeSpec(0.5), t, 0.0, DIM)
    d = squeezed_overlap_numeric(SqueezeSpec(0.5), t + 2.0 * math.pi, 0.0, DIM)
    assert c == pytest.approx(-d, abs=1e-10)


def test_squeezed_overlap_rejects_rotated_axis():
    with pytest.raises(ValueError):
        squeezed_overlap_numeric(SqueezeSpec(0.5, theta=0.1), 1.0, 0.0, DIM)


def test_mean_photon_squeezed():
    assert mean_photon_squeezed(0.5) == pytest.approx(math.sinh(0.5) ** 2, rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(
    alpha0=st.floats(0.0, 2.0),
    t=st.floats(0.0, 10.0),
    epsilon=st.floats(0.0, 1e-3),
)
def test_overlap_modulus_never_exceeds_one(alpha0, t, epsilon):
    got = abs(coherent_overlap_numeric(CoherentSpec(alpha0), t, epsilon, DIM))
    assert got <= 1.0 + 1e-12
