"""Cross-validation battery: closed forms against the truncated-Fock oracle.

Every analytic result the package exposes is re-derived here by an
independent route (exact diagonalization, epsilon-halving of residuals,
finite differences, Monte-Carlo counting) and turned into a pass/fail
check. Known internal inconsistencies between quoted rules and the
first-order forms are reported as discrepancies with numbers on both
sides rather than silently resolved.

All non-Monte-Carlo checks are deterministic and independent of the seed;
the two Monte-Carlo checks draw from ``numpy.random.default_rng(seed)``
and are flagged in the report.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from . import __version__, config, fock_core, homodyne_trap, metrology
from . import perturbation, presets, qkd_model, qsl_bounds, states
from .report import CheckEntry, DiscrepancyEntry, RunReport

# epsilon pair used by every halving check: quartering of the residual
# pins the error to the next order in epsilon
EPS_PAIR = (1e-4, 5e-5)
RATIO_WINDOW = (3.4, 4.6)
ORACLE_DIM = 256
FIDELITY_TIMES = (1.0, 2.5)
MC_SHOTS = 1_000_000
MC_ROTATION_SAMPLES = 200_000
Z_LIMIT = 3.0


def _ratio_ok(ratio: float) -> bool:
    return RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]


def _check_energy_order() -> CheckEntry:
    """Eigenvalue residuals against the first-order spectrum must quarter."""
    residuals = {}
    for eps in EPS_PAIR:
        spec = fock_core.diagonalize(fock_core.build_hamiltonian(ORACLE_DIM, eps))
        residuals[eps] = np.array(
            [abs(spec.eigenvalues[n] - perturbation.energy(n, eps)) for n in range(11)]
        )
    ratios = residuals[EPS_PAIR[0]] / residuals[EPS_PAIR[1]]
    passed = bool(np.all((ratios >= RATIO_WINDOW[0]) & (ratios <= RATIO_WINDOW[1])))
    return CheckEntry(
        name="energy_order",
        passed=passed,
        measured={
            "ratio_min": float(np.min(ratios)),
            "ratio_max": float(np.max(ratios)),
            "max_residual": float(np.max(residuals[EPS_PAIR[0]])),
        },
        detail="levels n=0..10, dim=256; residual(eps)/residual(eps/2) in [3.4, 4.6]",
    )


def _check_fidelity(kind: str) -> CheckEntry:
    if kind == "coherent":
        closed = lambda t, e: qsl_bounds.coherent_fidelity_closed(1.0, t, e)
        numeric = lambda t, e: abs(
            states.coherent_overlap_numeric(states.CoherentSpec(1.0), t, e, ORACLE_DIM)
        )
    else:
        closed = lambda t, e: qsl_bounds.squeezed_fidelity_closed(0.5, t, e)
        numeric = lambda t, e: abs(
            states.squeezed_overlap_numeric(states.SqueezeSpec(0.5), t, e, ORACLE_DIM)
        )
    passed = True
    measured: dict[str, float] = {}
    for t in FIDELITY_TIMES:
        diffs = {}
        for eps in EPS_PAIR:
            diffs[eps] = abs(closed(t, eps) - numeric(t, eps))
            if diffs[eps] > 5.0 * eps * eps:
                passed = False
        ratio = diffs[EPS_PAIR[0]] / diffs[EPS_PAIR[1]]
        if not _ratio_ok(ratio):
            passed = False
        measured[f"diff_t{t}"] = diffs[EPS_PAIR[0]]
        measured[f"ratio_t{t}"] = ratio
    return CheckEntry(
        name=f"{kind}_fidelity_oracle",
        passed=passed,
        measured=measured,
        detail="closed first-order fidelity vs Fock overlap; |diff| <= 5 eps^2 and quartering",
    )


def _eigenbasis_moments(bare: fock_core.StateVector, eps: float) -> tuple[float, float]:
    """Exact <H> and Var(H) for the bare amplitudes carried into the eigenbasis."""
    h = fock_core.build_hamiltonian(bare.dim, eps)
    spec = fock_core.diagonalize(h)
    state = fock_core.StateVector(bare.dim, spec.eigenvectors @ bare.amps)
    return fock_core.expectation(h, state).real, fock_core.variance(h, state)


def _check_moments(kind: str) -> CheckEntry:
    if kind == "coherent":
        bare = states.coherent_amplitudes(states.CoherentSpec(1.0), ORACLE_DIM)
        closed = lambda e: metrology.coherent_energy(1.0, e)
    else:
        bare = states.squeezed_state(states.SqueezeSpec(0.5), ORACLE_DIM)
        closed = lambda e: metrology.squeezed_energy(0.5, e)
    dmean, dvar = {}, {}
    passed = True
    for eps in EPS_PAIR:
        mean, var = _eigenbasis_moments(bare, eps)
        moments = closed(eps)
        dmean[eps] = abs(mean - moments.mean)
        dvar[eps] = abs(var - moments.variance)
        if dmean[eps] > 5.0 * eps * eps or dvar[eps] > 5.0 * eps * eps:
            passed = False
    ratio_mean = dmean[EPS_PAIR[0]] / dmean[EPS_PAIR[1]]
    ratio_var = dvar[EPS_PAIR[0]] / dvar[EPS_PAIR[1]]
    if not (_ratio_ok(ratio_mean) and _ratio_ok(ratio_var)):
        passed = False
    return CheckEntry(
        name=f"{kind}_moment_oracle",
        passed=passed,
        measured={
            "diff_mean": dmean[EPS_PAIR[0]],
            "diff_var": dvar[EPS_PAIR[0]],
            "ratio_mean": ratio_mean,
            "ratio_var": ratio_var,
        },
        detail="closed energy mean/variance vs exact moments on the constructed state",
    )


def _check_bound_gaps() -> CheckEntry:
    """Squeezed MT/ML corrections must lift the bounds and grow with r."""
    with warnings.catch_warnings():
        # the grid deliberately probes epsilon t ~ O(1) where the
        # first-order validity warning fires; the monotonicity of the
        # correction is what is under test here
        warnings.simplefilter("ignore")
        header, rows = presets.run_sweep(presets.PRESETS["fig2"])
    idx = {name: i for i, name in enumerate(header)}
    by_r: dict[float, list[tuple[float, float]]] = {}
    for row in rows:
        by_r.setdefault(row[idx["r"]], []).append(
            (row[idx["t_mt"]] - row[idx["t_mt0"]], row[idx["t_ml"]] - row[idx["t_ml0"]])
        )
    rs = sorted(by_r)
    avg_mt = [float(np.mean([g[0] for g in by_r[r]])) for r in rs]
    avg_ml = [float(np.mean([g[1] for g in by_r[r]])) for r in rs]
    min_gap = min(min(avg_mt), min(avg_ml))
    min_step = min(float(np.min(np.diff(avg_mt))), float(np.min(np.diff(avg_ml))))
    return CheckEntry(
        name="squeezed_bound_gap_monotone",
        passed=min_gap > 0.0 and min_step > 0.0,
        measured={"min_gap": min_gap, "min_step": min_step},
        detail="t-averaged (corrected - zeroth) bound gaps positive and increasing in r",
    )


def _check_squeeze_lift() -> CheckEntry:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        header, rows = presets.run_sweep(presets.PRESETS["fig4"])
    idx = {name: i for i, name in enumerate(header)}
    lifts = [row[idx["sf_db"]] - row[idx["sf_db0"]] for row in rows]
    min_lift = min(lifts)
    return CheckEntry(
        name="squeeze_factor_lift",
        passed=min_lift >= 0.0,
        measured={"min_lift_db": min_lift, "max_lift_db": max(lifts)},
        detail="corrected squeeze factor never below the uncorrected one on the preset grid",
    )


def _check_qkd_monotonicity() -> CheckEntry:
    """Key rate must fall with excess noise everywhere on a coarse grid."""
    h = 1e-6
    worst = -math.inf
    for t in np.linspace(0.2, 0.9, 5):
        for v_a in np.linspace(2.0, 10.0, 5):
            for xi in (0.005, 0.01, 0.02, 0.04, 0.08):
                up = qkd_model.key_rate(
                    qkd_model.QkdLinkParams(
                        transmissivity=float(t), v_a=float(v_a), xi_base=xi + h
                    )
                ).key_rate
                down = qkd_model.key_rate(
                    qkd_model.QkdLinkParams(
                        transmissivity=float(t), v_a=float(v_a), xi_base=xi - h
                    )
                ).key_rate
                worst = max(worst, (up - down) / (2.0 * h))
    return CheckEntry(
        name="qkd_noise_monotonicity",
        passed=worst < 0.0,
        measured={"max_dk_dxi": worst},
        detail="central-difference dK/dxi on a 5x5x5 (T, V_A, xi) grid",
    )


def _check_predictor_dominance() -> CheckEntry:
    link = qkd_model.QkdLinkParams(transmissivity=0.5, v_a=4.0, xi_base=0.01)
    passed = True
    worst_margin = math.inf
    for t_pilot, dt in ((1.0, 0.01), (5.0, 0.1), (0.5, 0.5)):
        rates = {}
        for predictor in ("zoh", "linear"):
            p = qkd_model.PhaseNoiseParams(
                sigma_phi0_sq=1e-5,
                c_factor=100.0,
                gamma=1e-4,
                epsilon=1e-3,
                t_window=10.0,
                t_pilot=t_pilot,
                dt=dt,
                predictor=predictor,
            )
            rates[predictor] = qkd_model.key_rate(link, p).key_rate
        margin = rates["linear"] - rates["zoh"]
        worst_margin = min(worst_margin, margin)
        if margin < 0.0:
            passed = False
    return CheckEntry(
        name="qkd_predictor_dominance",
        passed=passed,
        measured={"min_margin": worst_margin},
        detail="linear pilot interpolation never below zero-order hold in key rate",
    )


def _check_zero_epsilon() -> CheckEntry:
    p = qkd_model.PhaseNoiseParams(
        sigma_phi0_sq=1e-4,
        c_factor=100.0,
        gamma=0.0,
        epsilon=0.0,
        t_window=10.0,
        t_pilot=1.0,
        dt=0.01,
    )
    link = qkd_model.QkdLinkParams(transmissivity=0.5, v_a=4.0, xi_base=0.01)
    addendum = qkd_model.delta_xi_rel(p, link)
    return CheckEntry(
        name="qkd_zero_epsilon_addendum",
        passed=addendum == 0.0,
        measured={"addendum": addendum},
        detail="relativistic excess-noise addendum is exactly zero at epsilon = gamma = 0",
    )


def _check_trap_crossover() -> CheckEntry:
    """Closed crossover vs direct root on a synthetic unit-scale fixture."""
    cfg = homodyne_trap.TrapConfig(nu=0.5, p_lo=1e-3, kappa=1.0, epsilon=1e-3)
    closed = homodyne_trap.crossover_closed(cfg)
    numeric = homodyne_trap.crossover_numeric(cfg)
    rel = abs(closed - numeric) / closed
    return CheckEntry(
        name="trap_crossover_synthetic",
        passed=rel <= 1e-8,
        measured={"closed_s": closed, "numeric_s": numeric, "rel_diff": rel},
        detail="at 2 nu = 1 the closed expression and the bisection root must agree",
    )


def _check_bhd_identity() -> CheckEntry:
    """At epsilon = 0 the sensitivity is bitwise the error-propagation quotient."""
    passed = True
    measured = {}
    for label, delta_psi in (("pi_2", math.pi / 2.0), ("pi_3", math.pi / 3.0)):
        cfg = homodyne_trap.BhdConfig(alpha_s=3.0, alpha_lo_mag=3.0, delta_psi=delta_psi)
        lhs = homodyne_trap.phase_sensitivity(cfg, t=2.0, epsilon=0.0)
        rhs = math.sqrt(homodyne_trap.i_diff_variance(cfg)) / abs(
            homodyne_trap.i_diff_mean_slope(cfg)
        )
        measured[f"sensitivity_{label}"] = lhs
        if lhs != rhs:
            passed = False
    return CheckEntry(
        name="bhd_error_propagation_identity",
        passed=passed,
        measured=measured,
        detail="phase sensitivity at epsilon = 0 equals sqrt(Var I)/|d<I>/dpsi| exactly",
    )


def _check_homodyne_mc(rng: np.random.Generator) -> CheckEntry:
    passed = True
    measured = {}
    for label, delta_psi in (("pi_3", math.pi / 3.0), ("pi_2", math.pi / 2.0)):
        cfg = homodyne_trap.BhdConfig(alpha_s=2.0, alpha_lo_mag=3.0, delta_psi=delta_psi)
        samples = homodyne_trap.simulate_i_diff(cfg, MC_SHOTS, rng)
        mean_th = homodyne_trap.i_diff_mean(cfg)
        var_th = homodyne_trap.i_diff_variance(cfg)
        z_mean = abs(samples.mean() - mean_th) / math.sqrt(var_th / MC_SHOTS)
        # Var of the sample variance for a difference of Poissons, normal
        # approximation: (var + 2 var^2) / N
        z_var = abs(samples.var(ddof=1) - var_th) / math.sqrt(
            (var_th + 2.0 * var_th * var_th) / MC_SHOTS
        )
        measured[f"z_mean_{label}"] = float(z_mean)
        measured[f"z_var_{label}"] = float(z_var)
        if z_mean > Z_LIMIT or z_var > Z_LIMIT:
            passed = False
    return CheckEntry(
        name="homodyne_counting_mc",
        passed=passed,
        measured=measured,
        detail="Poisson two-port counting statistics vs closed mean and variance, 1e6 shots",
        monte_carlo=True,
    )


def _check_rotation_mc(rng: np.random.Generator) -> CheckEntry:
    link = qkd_model.QkdLinkParams(transmissivity=0.5, v_a=4.0, xi_base=0.01)
    passed = True
    measured = {}
    for sigma_sq in (2.5e-5, 1e-4, 4e-4):
        est = qkd_model.simulate_rotation_penalty(link, sigma_sq, MC_ROTATION_SAMPLES, rng)
        theory = qkd_model.delta_xi_phase(sigma_sq, link.transmissivity, link.v_a)
        se = math.sqrt(8.0 / MC_ROTATION_SAMPLES) * theory
        z = abs(est - theory) / se
        measured[f"z_sigma_{sigma_sq:g}"] = float(z)
        if z > Z_LIMIT:
            passed = False
    return CheckEntry(
        name="qkd_rotation_mc",
        passed=passed,
        measured=measured,
        detail="sampled small-rotation quadrature error vs sigma_phi^2 (V_A + 1/T)",
        monte_carlo=True,
    )


def _discrepancies() -> list[DiscrepancyEntry]:
    entries = []

    n, eps = 1, 1e-3
    first_order = perturbation.level_spacing(n, eps)
    quoted = 1.0 - 12.0 * n * eps
    entries.append(
        DiscrepancyEntry(
            name="level_spacing_rules",
            detail=(
                "two spacing reductions coexist: the first-order spectrum gives "
                "1 - (3/8) n eps while the quoted rule of thumb is 1 - 12 n eps; "
                "the slopes differ by a factor 32 and the spectrum is authoritative"
            ),
            values={
                "n": float(n),
                "epsilon": eps,
                "first_order": first_order,
                "quoted_rule": quoted,
                "slope_ratio": 32.0,
            },
        )
    )

    cfg = homodyne_trap.TrapConfig(**presets.trap_config_kwargs("hanneke"))
    computed = homodyne_trap.allan_shot_noise(cfg, 1.0)
    entries.append(
        DiscrepancyEntry(
            name="shot_noise_reference_value",
            detail=(
                "the closed shot-noise Allan floor at tau = 1 s evaluates a factor "
                "~pi below the quoted 5.3e-22 reference for the same parameters; "
                "both numbers are carried"
            ),
            values={
                "computed_1s": computed,
                "reference_1s": homodyne_trap.REFERENCE_SHOT_NOISE_1S,
                "ratio": homodyne_trap.REFERENCE_SHOT_NOISE_1S / computed,
            },
        )
    )

    closed = homodyne_trap.crossover_closed(cfg)
    numeric = homodyne_trap.crossover_numeric(cfg)
    entries.append(
        DiscrepancyEntry(
            name="crossover_closed_vs_numeric",
            detail=(
                "the printed crossover expression and the direct root of "
                "sigma_SN(tau) = sigma_rel(tau) differ by exactly (2 nu)^(-2/5); "
                "both are reported and the synthetic 2 nu = 1 fixture ties them"
            ),
            values={
                "closed_s": closed,
                "numeric_s": numeric,
                "ratio": numeric / closed,
                "two_nu_factor": (2.0 * cfg.nu) ** (-0.4),
            },
        )
    )

    spread = qsl_bounds.coherent_angle(1.0, math.pi, 0.0)
    s_angle = spread.value
    mean_energy = metrology.coherent_energy(1.0, 0.0).mean
    adopted = 2.0 * s_angle * s_angle / (math.pi * mean_energy)
    entries.append(
        DiscrepancyEntry(
            name="ml_normalization_variants",
            detail=(
                "the prose normalization of the mean-energy bound is ambiguous; "
                "the adopted 2 S^2 / (pi <E>) reproduces pi / (2 <E>) at "
                "orthogonality, the plausible variants do not"
            ),
            values={
                "angle": s_angle,
                "mean_energy": mean_energy,
                "adopted": adopted,
                "variant_half": s_angle * s_angle / (math.pi * mean_energy),
                "variant_pi": math.pi * s_angle * s_angle / mean_energy,
                "variant_pi_half": math.pi * s_angle * s_angle / (2.0 * mean_energy),
            },
        )
    )
    return entries


def run_selfcheck(seed: int = 42) -> RunReport:
    """Run every cross-check and return the structured report.

    Checks 1-12 are deterministic; the two Monte-Carlo checks each use a
    fresh generator seeded from ``seed`` so reruns reproduce bit-identical
    reports.
    """
    checks = [
        _check_energy_order(),
        _check_fidelity("coherent"),
        _check_fidelity("squeezed"),
        _check_moments("coherent"),
        _check_moments("squeezed"),
        _check_bound_gaps(),
        _check_squeeze_lift(),
        _check_qkd_monotonicity(),
        _check_predictor_dominance(),
        _check_zero_epsilon(),
        _check_trap_crossover(),
        _check_bhd_identity(),
        _check_homodyne_mc(np.random.default_rng(seed)),
        _check_rotation_mc(np.random.default_rng(seed)),
    ]
    echo = config.defaults()
    echo["selfcheck"] = {
        "epsilon_pair": list(EPS_PAIR),
        "ratio_window": list(RATIO_WINDOW),
        "oracle_dim": ORACLE_DIM,
        "mc_shots": MC_SHOTS,
        "mc_rotation_samples": MC_ROTATION_SAMPLES,
        "z_limit": Z_LIMIT,
    }
    return RunReport(
        version=__version__,
        seed=seed,
        config=echo,
        checks=checks,
        discrepancies=_discrepancies(),
    )
