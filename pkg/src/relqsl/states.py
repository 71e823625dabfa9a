"""Coherent and squeezed oscillator states and their semi-analytic overlaps.

Amplitude constructors work in log-space so large displacements do not
overflow, and the overlap routines propagate with the first-order corrected
spectrum. These overlaps are the oracles against which the closed-form
fidelities in qsl_bounds are tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .fock_core import StateVector
from .perturbation import energy

TAIL_LIMIT = 1e-12
ALPHA0_FOCK_CAP = 30.0


@dataclass(frozen=True)
class CoherentSpec:
    """Coherent state alpha = alpha0 * exp(i theta) with alpha0 = |alpha(0)|."""

    alpha0: float
    theta: float = 0.0

    def __post_init__(self):
        if self.alpha0 < 0:
            raise ValueError(f"alpha0 must be non-negative, got {self.alpha0}")


@dataclass(frozen=True)
class SqueezeSpec:
    """Squeezed vacuum with squeeze parameter r * exp(i theta)."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"r must be non-negative, got {self.r}")


def coherent_tail(alpha0: float, dim: int) -> float:
    """Poisson weight beyond the cutoff, P(N >= dim) for mean alpha0^2."""
    if alpha0 == 0.0:
        return 0.0
    return float(gammainc(dim, alpha0 * alpha0))


def coherent_amplitudes(spec: CoherentSpec, dim: int) -> StateVector:
    """Poissonian amplitude vector amps[n] = e^{-a0^2/2} (a0 e^{i theta})^n / sqrt(n!)."""
    if spec.alpha0 > ALPHA0_FOCK_CAP:
        raise ValueError(
            f"alpha0={spec.alpha0} exceeds the Fock-construction cap {ALPHA0_FOCK_CAP}; "
            "amplitudes this large are served by closed forms only"
        )
    tail = coherent_tail(spec.alpha0, dim)
    if tail > TAIL_LIMIT:
        need = dim
        while coherent_tail(spec.alpha0, need) > TAIL_LIMIT:
            need *= 2
        raise ValueError(
            f"truncation tail {tail:.3e} at dim={dim} exceeds {TAIL_LIMIT}; "
            f"use dim >= {need}"
        )
    amps = np.zeros(dim, dtype=np.complex128)
    if spec.alpha0 == 0.0:
        amps[0] = 1.0
        return StateVector(dim, amps)
    ns = np.arange(dim)
    logmag = -spec.alpha0 * spec.alpha0 / 2.0 + ns * math.log(spec.alpha0) - gammaln(ns + 1) / 2.0
    amps = np.exp(logmag) * np.exp(1j * spec.theta * ns)
    return StateVector(dim, amps)


def coherent_overlap_numeric(spec: CoherentSpec, t: float, epsilon: float, dim: int) -> complex:
    """Overlap <state(0)|state(t)> summed over the Poisson weights.

    Each number component advances with the first-order corrected level
    energy; the phase theta cancels in the weights. Semi-analytic oracle for
    the closed-form coherent fidelity.
    """
    state = coherent_amplitudes(spec, dim)
    weights = np.abs(state.amps) ** 2
    ns = np.arange(dim)
    phases = np.exp(-1j * energy(ns, epsilon) * t)
    return complex(np.sum(weights * phases))


def squeezed_coeffs(spec: SqueezeSpec, n_pairs: int) -> np.ndarray:
    """Even-component amplitudes f(2k) for k = 0..n_pairs-1 via the two-term recursion.

    f(0) = sqrt(sech r); f(2k) = -e^{i theta} tanh(r) sqrt((2k-1)/(2k)) f(2k-2).
    """
    if spec.r >= 5.0:
        raise ValueError(f"r={spec.r} is beyond the supported tail-controlled range (r < 5)")
    if n_pairs < 1:
        raise ValueError("need at least one pair coefficient")
    coeffs = np.zeros(n_pairs, dtype=np.complex128)
    coeffs[0] = 1.0 / math.sqrt(math.cosh(spec.r))
    factor = -np.exp(1j * spec.theta) * math.tanh(spec.r)
    for k in range(1, n_pairs):
        coeffs[k] = factor * math.sqrt((2 * k - 1) / (2 * k)) * coeffs[k - 1]
    return coeffs


def squeezed_coeffs_closed(spec: SqueezeSpec, n_pairs: int) -> np.ndarray:
    """Closed form f(2n) = sqrt((2n)!) (-tanh r)^n / (2^n n! sqrt(cosh r)), theta = 0 only.

    Kept as an independent cross-check of the recursion; assembled in
    log-space so large n does not overflow.
    """
    if spec.theta != 0.0:
        raise ValueError("closed-form pair coefficients are defined for theta = 0")
    if spec.r >= 5.0:
        raise ValueError(f"r={spec.r} is beyond the supported range (r < 5)")
    ns = np.arange(n_pairs)
    th = math.tanh(spec.r)
    if th == 0.0:
        out = np.zeros(n_pairs, dtype=np.complex128)
        out[0] = 1.0
        return out
    logmag = (
        gammaln(2 * ns + 1) / 2.0
        - ns * math.log(2.0)
        - gammaln(ns + 1)
        + ns * math.log(th)
        - math.log(math.cosh(spec.r)) / 2.0
    )
    return (np.exp(logmag) * (-1.0) ** ns).astype(np.complex128)


def squeezed_pair_tail(spec: SqueezeSpec, n_pairs: int) -> float:
    """Probability weight left above the last retained pair."""
    coeffs = squeezed_coeffs(spec, n_pairs)
    return max(0.0, 1.0 - float(np.sum(np.abs(coeffs) ** 2)))


def squeezed_state(spec: SqueezeSpec, dim: int) -> StateVector:
    """StateVector with f(2k) at the even indices and zeros elsewhere."""
    n_pairs = dim // 2
    tail = squeezed_pair_tail(spec, n_pairs)
    if tail > TAIL_LIMIT:
        raise ValueError(
            f"squeezed tail {tail:.3e} at dim={dim} exceeds {TAIL_LIMIT}; increase the cutoff"
        )
    coeffs = squeezed_coeffs(spec, n_pairs)
    amps = np.zeros(dim, dtype=np.complex128)
    amps[2 * np.arange(n_pairs)] = coeffs
    return StateVector(dim, amps)


def squeezed_overlap_numeric(spec: SqueezeSpec, t: float, epsilon: float, dim: int) -> complex:
    """Overlap <state(0)|state(t)> for the squeezed vacuum, theta = 0 propagation.

    The k-th pair component |2k> advances with the k-th corrected level
    energy. This pair-index rule keeps the overlap 2*pi periodic in t at
    epsilon = 0 and is the convention under which the closed-form squeezed
    fidelity in qsl_bounds reproduces this sum to O(eps^2).
    """
    if spec.theta != 0.0:
        raise ValueError("squeezed propagation is implemented for theta = 0 only")
    n_pairs = dim // 2
    tail = squeezed_pair_tail(spec, n_pairs)
    if tail > TAIL_LIMIT:
        raise ValueError(
            f"squeezed tail {tail:.3e} at dim={dim} exceeds {TAIL_LIMIT}; increase the cutoff"
        )
    weights = np.abs(squeezed_coeffs(spec, n_pairs)) ** 2
    ks = np.arange(n_pairs)
    phases = np.exp(-1j * energy(ks, epsilon) * t)
    return complex(np.sum(weights * phases))


def mean_photon_squeezed(r: float) -> float:
    """sinh^2 r, the mean photon number of the squeezed vacuum."""
    return math.sinh(r) ** 2
