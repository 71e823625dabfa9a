"""Closed-form evolution-time bounds with first-order relativistic corrections.

Two bound families (energy-variance and mean-energy) for coherent and
squeezed oscillator states, each reported as zeroth order plus an
epsilon-scaled correction. The unified speed limit is the pointwise maximum.
The correction terms diverge like 1/sqrt(1 - F0^2) at state revivals; such
points are flagged and the divergent part suppressed instead of returned as
infinities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

NEAR_REVIVAL_LIMIT = 1e-9
VALIDITY_FRACTION = 0.5


@dataclass(frozen=True)
class AngleResult:
    """Projective-space angle between initial and evolved state."""

    value: float
    near_revival: bool


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: zeroth order, epsilon-scaled correction, and their sum.

    ``coefficient`` is the correction divided by epsilon, exposed for
    epsilon sweeps; ``total`` is always the exact float sum of ``zeroth``
    and ``correction``.
    """

    t: float
    zeroth: float
    correction: float
    coefficient: float
    near_revival: bool
    total: float = field(init=False)

    def __post_init__(self):
        if self.zeroth < 0:
            raise ValueError(f"zeroth-order bound must be non-negative, got {self.zeroth}")
        object.__setattr__(self, "total", self.zeroth + self.correction)


def _clamp_unit(x: float) -> float:
    return min(1.0, max(-1.0, x))


def _warn_validity(name: str, zeroth: float, correction: float) -> None:
    # Static message text so the default warning filter collapses repeats
    # during grid sweeps.
    if zeroth > 0 and abs(correction) > VALIDITY_FRACTION * zeroth:
        warnings.warn(
            f"{name}: epsilon correction exceeds half the zeroth-order value "
            "at one or more evaluation points; first-order validity is doubtful there",
            stacklevel=3,
        )


# ---------------------------------------------------------------- coherent

def coherent_fidelity_closed(alpha0: float, t: float, epsilon: float) -> float:
    """|<state(0)|state(t)>| for a coherent state, to first order in epsilon.

    F = F0 * [1 + (3 eps/8) a0^2 t (1 + a0^2 cos t) sin t] with
    F0 = exp(a0^2 (cos t - 1)), clamped to [0, 1].
    """
    if alpha0 < 0:
        raise ValueError("alpha0 must be non-negative")
    f0 = math.exp(alpha0 * alpha0 * (math.cos(t) - 1.0))
    corr = 3.0 * epsilon / 8.0 * alpha0 * alpha0 * t * (1.0 + alpha0 * alpha0 * math.cos(t)) * math.sin(t)
    return min(1.0, max(0.0, f0 * (1.0 + corr)))


def coherent_angle(alpha0: float, t: float, epsilon: float) -> AngleResult:
    """arccos of the coherent fidelity, with the first-order angular correction.

    Near a revival (1 - F0^2 below 1e-9) the correction term diverges and is
    suppressed; the flag reports it.
    """
    f0 = math.exp(alpha0 * alpha0 * (math.cos(t) - 1.0))
    s0 = math.acos(_clamp_unit(f0))
    gap = 1.0 - f0 * f0
    if gap < NEAR_REVIVAL_LIMIT:
        return AngleResult(value=s0, near_revival=True)
    shift = (
        3.0 * epsilon / 8.0
        * alpha0 * alpha0 * t * (1.0 + alpha0 * alpha0 * math.cos(t)) * math.sin(t)
        * f0 / math.sqrt(gap)
    )
    return AngleResult(value=s0 - shift, near_revival=False)


def mt_coherent(alpha0: float, t: float, epsilon: float) -> BoundReport:
    """Energy-variance bound for a coherent state.

    zeroth = arccos(F0) / a0; the correction combines the angular shift with
    the first-order drop of the energy spread.
    """
    if alpha0 <= 0:
        raise ValueError("alpha0 must be positive: the vacuum does not evolve under this family")
    f0 = math.exp(alpha0 * alpha0 * (math.cos(t) - 1.0))
    w1 = math.acos(_clamp_unit(f0))
    zeroth = w1 / alpha0
    gap = 1.0 - f0 * f0
    near = gap < NEAR_REVIVAL_LIMIT
    coefficient = 3.0 / 8.0 * (1.0 + alpha0 * alpha0) / alpha0 * w1
    if not near:
        coefficient -= (
            3.0 / 8.0 * alpha0 * t * (1.0 + alpha0 * alpha0 * math.cos(t)) * math.sin(t)
            * f0 / math.sqrt(gap)
        )
    correction = epsilon * coefficient
    _warn_validity("mt_coherent", zeroth, correction)
    return BoundReport(t=t, zeroth=zeroth, correction=correction,
                       coefficient=coefficient, near_revival=near)


def ml_coherent(alpha0: float, t: float, epsilon: float) -> BoundReport:
    """Mean-energy bound for a coherent state.

    zeroth = 2 arccos(F0)^2 / (pi (1/2 + a0^2)); the correction combines the
    angular shift with the first-order drop of the mean energy.
    """
    if alpha0 <= 0:
        raise ValueError("alpha0 must be positive: the vacuum does not evolve under this family")
    a2 = alpha0 * alpha0
    f0 = math.exp(a2 * (math.cos(t) - 1.0))
    w1 = math.acos(_clamp_unit(f0))
    w2 = 0.5 + a2
    zeroth = 2.0 * w1 * w1 / (w2 * math.pi)
    w3 = (1.0 + 2.0 * a2) ** 2
    w4 = 1.0 + 4.0 * a2 + 2.0 * a2 * a2
    w5 = 4.0 * a2 * (1.0 + 2.0 * a2)
    gap = 1.0 - f0 * f0
    near = gap < NEAR_REVIVAL_LIMIT
    bracket = w4 * w1
    if not near:
        bracket -= w5 * f0 * t * (1.0 + a2 * math.cos(t)) * math.sin(t) / math.sqrt(gap)
    coefficient = 3.0 * w1 / (4.0 * w3 * math.pi) * bracket
    correction = epsilon * coefficient
    _warn_validity("ml_coherent", zeroth, correction)
    return BoundReport(t=t, zeroth=zeroth, correction=correction,
                       coefficient=coefficient, near_revival=near)


# ---------------------------------------------------------------- squeezed

def _squeezed_core(r: float, t: float) -> tuple[float, float, float, float]:
    """Shared building blocks: (y2, y6, y7, F0) of the squeezed overlap."""
    y2 = 3.0 + math.cosh(4.0 * r) - 2.0 * math.cos(t) * math.sinh(2.0 * r) ** 2
    th2 = math.tanh(r) ** 2
    y6 = -4.0 * math.sin(t) + math.sin(2.0 * t) * th2 + 2.0 * math.sin(t) * th2 * th2
    y7 = 1.0 - 2.0 * math.cos(t) * th2 + th2 * th2
    f0 = math.sqrt(2.0) / y2 ** 0.25
    return y2, y6, y7, f0


def squeezed_fidelity_closed(r: float, t: float, epsilon: float) -> float:
    """|<state(0)|state(t)>| for the squeezed vacuum, to first order in epsilon.

    F = sqrt(2) / y2^{1/4} - (3 eps t cosh^5 r sinh^2 r / (4 y2^2 y7^{1/4})) y6,
    clamped to [0, 1]. At t = 0 the leading term is exactly 1 for every r.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0.0:
        return 1.0
    y2, y6, y7, f0 = _squeezed_core(r, t)
    corr = 0.0
    if y7 > 0.0:
        corr = (
            3.0 * epsilon * t * math.cosh(r) ** 5 * math.sinh(r) ** 2
            / (4.0 * y2 * y2 * y7 ** 0.25)
        ) * y6
    return min(1.0, max(0.0, f0 - corr))


def squeezed_angle(r: float, t: float, epsilon: float) -> AngleResult:
    """arccos of the squeezed fidelity with its first-order correction."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0.0:
        return AngleResult(value=0.0, near_revival=True)
    y2, y6, y7, f0 = _squeezed_core(r, t)
    s0 = math.acos(_clamp_unit(f0))
    gap = 1.0 - f0 * f0
    if gap < NEAR_REVIVAL_LIMIT or y7 <= 0.0:
        return AngleResult(value=s0, near_revival=True)
    y8 = math.sqrt(math.sqrt(y2) - 2.0)
    shift = (
        3.0 * t * math.cosh(r) ** 5 * math.sinh(r) ** 2
        / (4.0 * y2 ** 1.75)
    ) * y6 / (y8 * y7 ** 0.25)
    return AngleResult(value=s0 + epsilon * shift, near_revival=False)


def mt_squeezed(r: float, t: float, epsilon: float) -> BoundReport:
    """Energy-variance bound for the squeezed vacuum.

    zeroth = sqrt(2) csch(2r) arccos(sqrt2 / y2^{1/4}); the correction carries
    the angular shift plus the first-order drop of the energy spread.
    """
    if r <= 0:
        raise ValueError("r must be positive: the unsqueezed vacuum has zero energy spread")
    y2, y6, y7, f0 = _squeezed_core(r, t)
    y1 = math.acos(_clamp_unit(f0))
    y3 = math.sqrt(2.0) / math.sinh(2.0 * r)
    y4 = math.cosh(2.0 * r)
    zeroth = y3 * y1
    gap = 1.0 - f0 * f0
    near = gap < NEAR_REVIVAL_LIMIT
    bracket = 6.0 * y4 * y1
    if not near and y7 > 0.0:
        y8 = math.sqrt(math.sqrt(y2) - 2.0)
        y5 = 8.0 * t * math.cosh(r) ** 5 * math.sinh(r) ** 2 / y2 ** 1.75
        bracket += y5 * y6 / (y7 ** 0.25 * y8)
    coefficient = 3.0 * y3 / 32.0 * bracket
    correction = epsilon * coefficient
    _warn_validity("mt_squeezed", zeroth, correction)
    return BoundReport(t=t, zeroth=zeroth, correction=correction,
                       coefficient=coefficient, near_revival=near)


def ml_squeezed(r: float, t: float, epsilon: float) -> BoundReport:
    """Mean-energy bound for the squeezed vacuum.

    zeroth = (4 sech 2r / pi) arccos(sqrt2 / y2^{1/4})^2; the correction
    carries the angular shift plus the first-order drop of the mean energy.
    """
    if r <= 0:
        raise ValueError("r must be positive: the unsqueezed vacuum does not evolve")
    x2, x6, x7, f0 = _squeezed_core(r, t)
    x1 = math.acos(_clamp_unit(f0))
    x3 = 1.0 / math.cosh(2.0 * r)
    x4 = 1.0 + 3.0 * math.cosh(4.0 * r)
    zeroth = 4.0 * x3 / math.pi * x1 * x1
    gap = 1.0 - f0 * f0
    near = gap < NEAR_REVIVAL_LIMIT
    bracket = x4 * x3 * x1
    if not near and x7 > 0.0:
        x8 = math.sqrt(math.sqrt(x2) - 2.0)
        x5 = 32.0 * t * math.cosh(r) ** 5 * math.sinh(r) ** 2 / x2 ** 1.75
        bracket += x5 * x6 / (x7 ** 0.25 * x8)
    coefficient = 3.0 * x3 / (16.0 * math.pi) * x1 * bracket
    correction = epsilon * coefficient
    _warn_validity("ml_squeezed", zeroth, correction)
    return BoundReport(t=t, zeroth=zeroth, correction=correction,
                       coefficient=coefficient, near_revival=near)


def t_qsl(mt: BoundReport, ml: BoundReport) -> BoundReport:
    """Unified speed limit: the larger of the two bounds; ties go to the first argument.

    Both reports must refer to the same evolution time.
    """
    if mt.t != ml.t:
        raise ValueError(f"bound reports refer to different times: {mt.t} vs {ml.t}")
    return mt if mt.total >= ml.total else ml
