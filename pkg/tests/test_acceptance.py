"""Acceptance gate: one test per criterion, each printing its PASS/FAIL line.

Three supersonic checks (stationary correctness, decay rate, nonlinear
stability) fail by construction: with both velocity components pinned to the
same inflow value, the supersonic far field has a single decaying direction
whose u and v components carry opposite signs, so no nontrivial profile
exists to be measured.  The failures report the measured obstruction
(|v(0) - u_minus| = 2*delta) rather than masking it; see the repository
README for the analysis.
"""
import pytest

from twophaselab import acceptance


def _check(result):
    print(result.line())
    assert result.passed, result.details


def test_criterion_01_eigenvalue_identities():
    _check(acceptance.criterion_01())


def test_criterion_02_regime_table():
    _check(acceptance.criterion_02())


def test_criterion_03_stationary_supersonic():
    _check(acceptance.criterion_03_supersonic())


def test_criterion_03_stationary_subsonic():
    _check(acceptance.criterion_03_subsonic())


def test_criterion_04_decay_supersonic():
    _check(acceptance.criterion_04_supersonic())


def test_criterion_04_decay_subsonic():
    _check(acceptance.criterion_04_subsonic())


def test_criterion_04_decay_sonic():
    _check(acceptance.criterion_04_sonic())


def test_criterion_05_sonic_monotonicity():
    _check(acceptance.criterion_05())


def test_criterion_06_boundary_slope_scaling():
    _check(acceptance.criterion_06())


def test_criterion_07_well_balancedness():
    _check(acceptance.criterion_07())


def test_criterion_08_stability_supersonic():
    _check(acceptance.criterion_08_supersonic())


def test_criterion_08_stability_subsonic():
    _check(acceptance.criterion_08_subsonic())


def test_criterion_08_stability_sonic():
    _check(acceptance.criterion_08_sonic())


def test_criterion_09_conservation():
    _check(acceptance.criterion_09())


def test_criterion_10_weighted_inequalities():
    _check(acceptance.criterion_10())


def test_criterion_11_determinism():
    _check(acceptance.criterion_11())
