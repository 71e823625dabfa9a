"""Truncated Fock-space linear algebra for the quartic-corrected oscillator.

Dense-matrix oracle used to validate every closed form in this package:
ladder matrices, Hamiltonian assembly H = (p^2 + x^2)/2 - eps*p^4/8,
spectral decomposition, and exact time evolution. Everything here is in
natural units (m = omega = hbar = 1) and brute force by design; no
normal-ordering shortcuts are taken anywhere.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

MIN_DIM = 8
EPSILON_WARN_THRESHOLD = 0.1
HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Operator restricted to the lowest ``dim`` Fock levels.

    Parameters
    ----------
    dim : int
        Fock cutoff, at least 8.
    entries : ndarray
        Complex dim x dim matrix.
    """

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if self.dim < MIN_DIM:
            raise ValueError(
                f"Fock cutoff dim={self.dim} is too small; the quartic term "
                f"couples n to n+-4, so at least dim={MIN_DIM} is required"
            )
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match dim={self.dim}"
            )

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        return bool(np.all(np.abs(self.entries - self.entries.conj().T) <= atol))

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return TruncatedOperator(self.dim, self.entries @ other.entries)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized state on the lowest ``dim`` Fock levels."""

    dim: int
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (self.dim,):
            raise ValueError(f"amps shape {self.amps.shape} does not match dim={self.dim}")
        norm = float(np.linalg.norm(self.amps))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(
                f"state norm {norm!r} deviates from 1 by more than {NORM_ATOL}; "
                "renormalize or increase the cutoff before constructing"
            )


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigen-decomposition of a Hermitian truncated operator.

    ``eigenvalues`` ascending, ``eigenvectors`` column-orthonormal, so that
    H = V diag(w) V^dagger.
    """

    dim: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        if self.eigenvalues.shape != (self.dim,):
            raise ValueError("eigenvalue count does not match dim")
        if self.eigenvectors.shape != (self.dim, self.dim):
            raise ValueError("eigenvector matrix shape does not match dim")
        if np.any(np.diff(self.eigenvalues) < 0):
            raise ValueError("eigenvalues must be sorted ascending")


def build_ladder(dim: int) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Return the truncated annihilation and creation matrices (a0, a0dag).

    a0[n-1, n] = sqrt(n); a0dag is the conjugate transpose. On the truncated
    space [a0, a0dag] equals the identity everywhere except the last diagonal
    entry, which is a cutoff artifact.
    """
    if dim < MIN_DIM:
        raise ValueError(
            f"Fock cutoff dim={dim} is too small; at least {MIN_DIM} levels are needed"
        )
    a = np.zeros((dim, dim), dtype=np.complex128)
    ns = np.arange(1, dim)
    a[ns - 1, ns] = np.sqrt(ns)
    return TruncatedOperator(dim, a), TruncatedOperator(dim, a.conj().T)


def build_quadratures(dim: int) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Return position and momentum matrices x = (a0dag + a0)/sqrt2, p = i(a0dag - a0)/sqrt2."""
    a, adag = build_ladder(dim)
    x = (adag.entries + a.entries) / np.sqrt(2.0)
    p = 1j * (adag.entries - a.entries) / np.sqrt(2.0)
    return TruncatedOperator(dim, x), TruncatedOperator(dim, p)


def build_number(dim: int) -> TruncatedOperator:
    """Return the number operator a0dag a0 (diagonal 0..dim-1)."""
    return TruncatedOperator(dim, np.diag(np.arange(dim, dtype=np.complex128)))


def build_hamiltonian(dim: int, epsilon: float) -> TruncatedOperator:
    """Assemble H = (p^2 + x^2)/2 - epsilon * p^4 / 8 on the truncated space.

    p^4 is the exact fourth matrix power of the truncated p; the operator is
    Hermitian by construction. epsilon above 0.1 is allowed but triggers a
    warning since the first-order treatment downstream degrades there.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    if epsilon > EPSILON_WARN_THRESHOLD:
        warnings.warn(
            f"epsilon={epsilon} is large for a first-order correction; "
            "results beyond epsilon ~ 0.1 are exploratory",
            stacklevel=2,
        )
    x, p = build_quadratures(dim)
    p4 = np.linalg.matrix_power(p.entries, 4)
    h = (p.entries @ p.entries + x.entries @ x.entries) / 2.0 - epsilon * p4 / 8.0
    return TruncatedOperator(dim, h)


def diagonalize(op: TruncatedOperator) -> SpectralDecomposition:
    """Dense eigendecomposition of a Hermitian operator.

    Raises if the input is not Hermitian. The result is verified: eigenpair
    residuals below 1e-9 * ||H||_F and column orthonormality below 1e-10.
    """
    if not op.is_hermitian():
        raise ValueError("diagonalize requires a Hermitian operator")
    w, v = np.linalg.eigh(op.entries)
    scale = float(np.linalg.norm(op.entries))
    resid = np.linalg.norm(op.entries @ v - v * w, axis=0)
    if scale > 0 and float(resid.max()) > 1e-9 * scale:
        raise ArithmeticError(
            f"eigenpair residual {resid.max():.3e} exceeds 1e-9 * ||H|| = {1e-9*scale:.3e}"
        )
    ortho = np.abs(v.conj().T @ v - np.eye(op.dim)).max()
    if float(ortho) > 1e-10:
        raise ArithmeticError(f"eigenvector orthonormality defect {ortho:.3e} exceeds 1e-10")
    return SpectralDecomposition(op.dim, w, v)


def evolve(state: StateVector, spec: SpectralDecomposition, t: float) -> StateVector:
    """Apply exp(-i H t) through the spectral decomposition of H."""
    if state.dim != spec.dim:
        raise ValueError(f"dimension mismatch: state {state.dim} vs decomposition {spec.dim}")
    coeffs = spec.eigenvectors.conj().T @ state.amps
    out = spec.eigenvectors @ (np.exp(-1j * spec.eigenvalues * t) * coeffs)
    return StateVector(state.dim, out)


def expectation(op: TruncatedOperator, state: StateVector) -> complex:
    """Return <psi|O|psi>."""
    if op.dim != state.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs state {state.dim}")
    return complex(np.vdot(state.amps, op.entries @ state.amps))


def variance(op: TruncatedOperator, state: StateVector) -> float:
    """Return <O^2> - <O>^2 for a Hermitian O, clamped at zero within -1e-12."""
    if op.dim != state.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs state {state.dim}")
    if not op.is_hermitian():
        raise ValueError("variance requires a Hermitian operator")
    ovec = op.entries @ state.amps
    second = float(np.real(np.vdot(ovec, ovec)))
    mean = float(np.real(np.vdot(state.amps, ovec)))
    var = second - mean * mean
    if var < 0.0:
        if var < -1e-12:
            raise ArithmeticError(f"variance {var!r} is negative beyond tolerance")
        var = 0.0
    return var


def default_cutoff(alpha0: float = 0.0, r: float = 0.0) -> int:
    """Fock cutoff policy: large enough that Poisson and squeezed tails sit below 1e-12."""
    return max(256, int(np.ceil(8.0 * (alpha0 * alpha0 + 1.0))), int(np.ceil(32.0 * np.exp(2.0 * r))))
