"""Sweep grids, their evaluators, and the named presets.

A sweep is data: up to three axes (name, start, stop, step), a map of fixed
parameters, a target that turns one parameter point into a row of results,
and the column selection for the output file. The named presets reproduce
the standard surfaces (speed-limit times over time and coherent amplitude,
squeezed bounds over time and squeeze parameter, squeeze factor over its
full domain) without any preset-specific code.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import metrology, qsl_bounds
from .config import SWEEP_PARAM_NAMES
from .homodyne_trap import ELECTRON_MASS, epsilon_from_trap

MAX_AXES = 3


@dataclass(frozen=True)
class Axis:
    """Inclusive arithmetic grid start, start+step, ..., stop."""

    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.name not in SWEEP_PARAM_NAMES:
            raise ValueError(
                f"unknown axis name {self.name!r}; choose from {SWEEP_PARAM_NAMES}"
            )
        if self.step <= 0:
            raise ValueError(f"axis {self.name}: step must be positive, got {self.step}")
        if self.start > self.stop:
            raise ValueError(
                f"axis {self.name}: start {self.start} exceeds stop {self.stop}"
            )

    def values(self) -> np.ndarray:
        count = int(round((self.stop - self.start) / self.step)) + 1
        return self.start + self.step * np.arange(count)


@dataclass(frozen=True)
class SweepSpec:
    """Declarative sweep: axes x fixed parameters evaluated by one target."""

    target: str
    axes: tuple[Axis, ...]
    columns: tuple[str, ...]
    fixed: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown sweep target {self.target!r}")
        if not 1 <= len(self.axes) <= MAX_AXES:
            raise ValueError(f"sweeps take 1 to {MAX_AXES} axes, got {len(self.axes)}")
        required = TARGETS[self.target].required
        supplied = {axis.name for axis in self.axes} | set(self.fixed)
        if len(supplied) != len(self.axes) + len(self.fixed):
            raise ValueError("a parameter appears both as an axis and as fixed")
        if supplied != required:
            raise ValueError(
                f"target {self.target!r} needs exactly {sorted(required)}, "
                f"got {sorted(supplied)}"
            )


@dataclass(frozen=True)
class Target:
    required: frozenset[str]
    evaluate: Callable[[dict[str, float]], dict[str, Any]]


def _eval_qsl_coherent(params: dict[str, float]) -> dict[str, Any]:
    alpha0 = math.sqrt(params["alpha0_sq"])
    t = params["t"]
    epsilon = params["epsilon"]
    mt = qsl_bounds.mt_coherent(alpha0, t, epsilon)
    ml = qsl_bounds.ml_coherent(alpha0, t, epsilon)
    best = qsl_bounds.t_qsl(mt, ml)
    return {
        "t": t,
        "alpha0_sq": params["alpha0_sq"],
        "epsilon": epsilon,
        "t_mt0": mt.zeroth,
        "t_mt": mt.total,
        "t_ml0": ml.zeroth,
        "t_ml": ml.total,
        "t_qsl": best.total,
        "near_revival": mt.near_revival,
    }


def _eval_qsl_squeezed(params: dict[str, float]) -> dict[str, Any]:
    r = params["r"]
    t = params["t"]
    epsilon = params["epsilon"]
    mt = qsl_bounds.mt_squeezed(r, t, epsilon)
    ml = qsl_bounds.ml_squeezed(r, t, epsilon)
    best = qsl_bounds.t_qsl(mt, ml)
    return {
        "r": r,
        "t": t,
        "epsilon": epsilon,
        "t_mt0": mt.zeroth,
        "t_mt": mt.total,
        "t_ml0": ml.zeroth,
        "t_ml": ml.total,
        "t_qsl": best.total,
        "near_revival": mt.near_revival,
    }


def _eval_squeeze_factor(params: dict[str, float]) -> dict[str, Any]:
    r = params["r"]
    alpha0 = math.sqrt(params["alpha_sq"])
    theta = params["theta"]
    epsilon = params["epsilon"]
    baseline = metrology.squeeze_ratio(r, alpha0, theta, 0.0)
    corrected = metrology.squeeze_ratio(r, alpha0, theta, epsilon)
    return {
        "r": r,
        "alpha_sq": params["alpha_sq"],
        "theta": theta,
        "epsilon": epsilon,
        "ratio0": baseline.ratio,
        "sf_db0": baseline.sf_db,
        "ratio": corrected.ratio,
        "sf_db": corrected.sf_db,
    }


TARGETS: dict[str, Target] = {
    "qsl_coherent": Target(frozenset({"t", "alpha0_sq", "epsilon"}), _eval_qsl_coherent),
    "qsl_squeezed": Target(frozenset({"r", "t", "epsilon"}), _eval_qsl_squeezed),
    "squeeze_factor": Target(
        frozenset({"r", "alpha_sq", "theta", "epsilon"}), _eval_squeeze_factor
    ),
}

# The r and alpha0_sq lower corners skip the degenerate points: squeezed
# bounds vanish identically at r = 0, and alpha0 = 0 never leaves the ground
# state. The time-and-amplitude sweep carries both the uncorrected and the
# corrected case as an epsilon axis; the other presets fix epsilon and emit
# the epsilon = 0 baseline next to the corrected value in each row.
PRESETS: dict[str, SweepSpec] = {
    "fig1": SweepSpec(
        target="qsl_coherent",
        axes=(
            Axis("t", 0.05, 6.3, 0.05),
            Axis("alpha0_sq", 0.1, 3.0, 0.1),
            Axis("epsilon", 0.0, 0.08, 0.08),
        ),
        columns=("t", "alpha0_sq", "epsilon", "t_mt", "t_ml", "t_qsl", "near_revival"),
    ),
    "fig2": SweepSpec(
        target="qsl_squeezed",
        axes=(Axis("r", 0.05, 0.4, 0.05), Axis("t", 0.2, 6.0, 0.2)),
        fixed={"epsilon": 0.08},
        columns=("r", "t", "epsilon", "t_mt0", "t_mt", "t_ml0", "t_ml", "near_revival"),
    ),
    "fig4": SweepSpec(
        target="squeeze_factor",
        axes=(
            Axis("r", 0.0, 1.8, 0.1),
            Axis("alpha_sq", 0.0, 3.0, 0.1),
            Axis("theta", 0.0, 3.0 * math.pi / 4.0, math.pi / 4.0),
        ),
        fixed={"epsilon": 0.08},
        columns=("r", "alpha_sq", "theta", "epsilon", "ratio0", "sf_db0", "ratio", "sf_db"),
    ),
}

TRAP_PRESETS: dict[str, dict[str, float]] = {
    # single-electron cyclotron readout: 149 GHz, 1 mW local oscillator,
    # drift prefactor 2.0e2; epsilon is derived from nu and the mass
    "hanneke": {
        "nu": 149e9,
        "p_lo": 1e-3,
        "kappa": 200.0,
        "epsilon": 0.0,
        "mass": ELECTRON_MASS,
        "tau": 1.0,
    },
}


def trap_config_kwargs(name: str) -> dict[str, float]:
    """TrapConfig keywords for a named preset; epsilon = 0 means derive it."""
    preset = dict(TRAP_PRESETS[name])
    preset.pop("tau")
    if preset["epsilon"] == 0.0:
        preset["epsilon"] = epsilon_from_trap(preset["nu"], preset["mass"])
    return preset


def sweep_from_config(section: dict[str, Any]) -> SweepSpec:
    """Build a SweepSpec from a validated [sweep] config section."""
    if section.get("preset"):
        return PRESETS[section["preset"]]
    target = section.get("target")
    if not target:
        raise ValueError("sweep needs either preset or target plus axes")
    axes = []
    for i in (1, 2, 3):
        name = section.get(f"axis{i}_name")
        parts = [section.get(f"axis{i}_{p}") for p in ("start", "stop", "step")]
        if name is None and all(p is None for p in parts):
            continue
        if name is None or any(p is None for p in parts):
            raise ValueError(f"axis{i} is only partially specified")
        axes.append(Axis(name, *parts))
    if not axes:
        raise ValueError("sweep target given but no axes defined")
    fixed = {
        name: section[name]
        for name in SWEEP_PARAM_NAMES
        if section.get(name) is not None
    }
    columns_by_target = {
        "qsl_coherent": PRESETS["fig1"].columns,
        "qsl_squeezed": PRESETS["fig2"].columns,
        "squeeze_factor": PRESETS["fig4"].columns,
    }
    return SweepSpec(
        target=target, axes=tuple(axes), fixed=fixed, columns=columns_by_target[target]
    )


def run_sweep(spec: SweepSpec, threads: int = 1) -> tuple[tuple[str, ...], list[list[Any]]]:
    """Evaluate the grid in axis-major order and project the column set.

    Points may be evaluated concurrently; the row order is fixed by the grid
    alone, so output is deterministic regardless of thread count.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    evaluate = TARGETS[spec.target].evaluate
    names = [axis.name for axis in spec.axes]
    grids = np.meshgrid(*[axis.values() for axis in spec.axes], indexing="ij")
    points = [
        dict(spec.fixed, **dict(zip(names, combo)))
        for combo in zip(*(g.ravel() for g in grids))
    ]
    if threads == 1:
        results = [evaluate(point) for point in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, points))
    rows = [[row[column] for column in spec.columns] for row in results]
    return spec.columns, rows
