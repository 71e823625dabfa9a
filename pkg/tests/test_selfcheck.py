"""The cross-validation battery: verdicts, determinism, and failure wiring."""

import math

import numpy as np
import pytest

from relqsl import perturbation
from relqsl.selfcheck import run_selfcheck

EXPECTED_CHECK_NAMES = {
    "energy_order",
    "coherent_fidelity_oracle",
    "squeezed_fidelity_oracle",
    "coherent_moment_oracle",
    "squeezed_moment_oracle",
    "squeezed_bound_gap_monotone",
    "squeeze_factor_lift",
    "qkd_noise_monotonicity",
    "qkd_predictor_dominance",
    "qkd_zero_epsilon_addendum",
    "trap_crossover_synthetic",
    "bhd_error_propagation_identity",
    "homodyne_counting_mc",
    "qkd_rotation_mc",
}

EXPECTED_DISCREPANCY_NAMES = {
    "level_spacing_rules",
    "shot_noise_reference_value",
    "crossover_closed_vs_numeric",
    "ml_normalization_variants",
}


@pytest.fixture(scope="module")
def report():
    return run_selfcheck(42)


def test_battery_passes(report):
    failing = [c.name for c in report.checks if not c.passed]
    assert failing == []
    assert report.passed
    assert report.seed == 42


def test_check_roster(report):
    assert {c.name for c in report.checks} == EXPECTED_CHECK_NAMES
    mc = {c.name for c in report.checks if c.monte_carlo}
    assert mc == {"homodyne_counting_mc", "qkd_rotation_mc"}


def test_discrepancies_carry_numbers_on_both_sides(report):
    by_name = {d.name: d for d in report.discrepancies}
    assert set(by_name) == EXPECTED_DISCREPANCY_NAMES

    spacing = by_name["level_spacing_rules"].values
    assert spacing["first_order"] == pytest.approx(0.999625, rel=1e-12)
    assert spacing["quoted_rule"] == pytest.approx(0.988, rel=1e-12)
    assert spacing["slope_ratio"] == 32.0

    shot = by_name["shot_noise_reference_value"].values
    assert shot["computed_1s"] == pytest.approx(1.6781277400152137e-22, rel=1e-12)
    assert shot["reference_1s"] == 5.3e-22
    assert shot["ratio"] == pytest.approx(shot["reference_1s"] / shot["computed_1s"], rel=1e-12)

    crossover = by_name["crossover_closed_vs_numeric"].values
    assert crossover["closed_s"] == pytest.approx(865.0455666694274, rel=1e-12)
    assert crossover["ratio"] == pytest.approx(crossover["two_nu_factor"], rel=1e-9)

    ml = by_name["ml_normalization_variants"].values
    assert ml["angle"] == pytest.approx(math.acos(math.exp(-2.0)), rel=1e-12)
    assert ml["mean_energy"] == 1.5
    assert ml["adopted"] == pytest.approx(0.8740164088960273, rel=1e-12)
    assert ml["adopted"] != ml["variant_half"]
    assert ml["variant_pi"] == pytest.approx(4.0 * ml["variant_pi_half"] / 2.0, rel=1e-12)


def test_config_echo_carries_defaults(report):
    assert report.config["spectrum"]["dim"] == 256
    assert report.config["qkd"]["beta"] == 0.95
    assert "selfcheck" in report.config


def test_deterministic_outside_monte_carlo(report):
    other = run_selfcheck(7)
    got = {c.name: c for c in other.checks}
    for check in report.checks:
        if check.monte_carlo:
            continue
        assert got[check.name].measured == check.measured, check.name
    assert other.passed


def test_monte_carlo_uses_the_seed(report):
    other = run_selfcheck(7)
    ours = {c.name: c.measured for c in report.checks if c.monte_carlo}
    theirs = {c.name: c.measured for c in other.checks if c.monte_carlo}
    assert any(ours[name] != theirs[name] for name in ours)


def test_broken_spectrum_is_caught(monkeypatch):
    true_energy = perturbation.energy

    def flipped(n, epsilon):
        return true_energy(n, epsilon) + 64.0 * epsilon * np.square(n)

    monkeypatch.setattr(perturbation, "energy", flipped)
    report = run_selfcheck(42)
    by_name = {c.name: c for c in report.checks}
    assert not by_name["energy_order"].passed
    assert not report.passed
    # the oracle comparisons bind the unpatched closed forms at import time
    assert by_name["coherent_fidelity_oracle"].passed
