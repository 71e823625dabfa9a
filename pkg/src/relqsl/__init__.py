"""First-order relativistic corrections for Gaussian oscillator states.

The library computes quantum-speed-limit bounds, energy moments and Fisher
information, squeeze factors, balanced-homodyne sensitivities, trap
Allan-deviation budgets and CV-QKD noise penalties, all carrying the leading
relativistic kinetic correction, and cross-checks every closed form against
truncated Fock-space diagonalization. The `relqsl` console script exposes the
batch front-end.
"""

from . import (
    fock_core,
    homodyne_trap,
    metrology,
    perturbation,
    qkd_model,
    qsl_bounds,
    states,
)

__version__ = "0.1.0"

__all__ = [
    "fock_core",
    "perturbation",
    "states",
    "qsl_bounds",
    "metrology",
    "homodyne_trap",
    "qkd_model",
    "__version__",
]
