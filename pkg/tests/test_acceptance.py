"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import math

import numpy as np
from hypothesis import given, settings

from pointer_tof import (
    DeltaSchedule,
    condition_on_tof,
    delta_coefficients,
    delta_symplectic_composed,
    desk_setup,
    gaussian_pulse_schedule,
    gradient_d,
    propagate,
    quadrature_coefficients,
    reference_setup,
    symplectic_from_coefficients,
    tof_expectation,
    width_ratio,
)
from pointer_tof.oracle import GridSpec, oracle_check
from pointer_tof.sweep import find_critical_width
from pointer_tof.tof import assign_tof_value, sample_readouts
from tests.strategies import setups

REF = reference_setup(dP0=150.0, dp=30.0)


def test_01_mean_tof_value(criterion):
    value = tof_expectation(REF)
    err = abs(value - 100.0)
    criterion(1, err <= 1e-10, f"<P_tof> = {value!r}, |error| = {err:.2e} (tol 1e-10)")


def test_02_added_noise_variance(criterion):
    var = propagate(REF).variance("P")
    rel = abs(var - 24300.0) / 24300.0
    criterion(2, rel <= 1e-8, f"Var P(T) = {var!r}, rel error = {rel:.2e} (tol 1e-8)")


def test_03_closed_form_vs_composed(criterion):
    worst = []

    @settings(max_examples=100, derandomize=True, database=None)
    @given(setups())
    def compare(setup):
        composed = delta_symplectic_composed(setup).matrix
        closed = symplectic_from_coefficients(
            delta_coefficients(DeltaSchedule.from_setup(setup), setup.T), setup).matrix
        worst.append(float(np.max(np.abs(composed - closed))))

    compare()
    entry = delta_symplectic_composed(REF).entry("x2", "p1")
    expected = -REF.kappa**2 * (REF.t2 - REF.t1)
    ok = len(worst) >= 100 and max(worst) <= 1e-12 and abs(entry - expected) <= 1e-12
    criterion(3, ok, f"{len(worst)} setups, max entry diff = {max(worst):.2e} (tol 1e-12); "
                     f"S[x2,p1] = {entry!r} vs {expected!r}")


def test_04_smooth_to_delta_convergence(criterion):
    delta = delta_symplectic_composed(REF).matrix
    errors = []
    for sigma in (1e-1, 1e-2, 1e-3):
        sched = gaussian_pulse_schedule(REF.kappa, REF.t1, REF.t2, sigma, T=REF.T)
        S = symplectic_from_coefficients(quadrature_coefficients(sched, REF.T), REF)
        errors.append(float(np.max(np.abs(S.matrix - delta))))
    ok = errors[0] > errors[1] > errors[2] and errors[2] < 1e-3
    criterion(4, ok, "max entry error at sigma 1e-1, 1e-2, 1e-3 = " + ", ".join(f"{e:.3e}" for e in errors)
              + " (monotone, last < 1e-3)")


def test_05_conditioning_exactness(criterion):
    sd_t = math.sqrt(propagate(REF).variance("P"))
    by_readout = [condition_on_tof(REF, REF.P0 + k * sd_t).var_pc for k in (-2, 0, 2)]
    by_momentum = [condition_on_tof(REF.replace(P0=P0), P0).var_pc for P0 in (0.0, 100.0, 1e4)]
    spread = max(np.ptp(by_readout), np.ptp(by_momentum))
    p_c = condition_on_tof(REF, REF.P0).p_c
    ok = spread <= 1e-12 and p_c == REF.P0
    criterion(5, ok, f"var_pc spread = {spread:.2e} (tol 1e-12); p_c at p_out = P0: {p_c!r}")


def test_06_gradient_behaviour(criterion):
    ds = [gradient_d(REF.replace(dP0=w)) for w in (1e2, 1e3, 1e4, 1e6)]
    decreasing = all(a > b for a, b in zip(ds, ds[1:]))
    outs = REF.P0 + np.array([-50.0, 10.0, 80.0])
    pcs = np.array([condition_on_tof(REF, p).p_c for p in outs])
    # p_c - p_out = d (P0 - p_out): least-squares slope through three readouts
    d_fit = np.polyfit(REF.P0 - outs, pcs - outs, 1)[0]
    d_ref = gradient_d(REF)
    ok = decreasing and ds[-1] < 1e-4 and abs(d_fit - d_ref) <= 1e-9
    criterion(6, ok, "d at dP0 = 1e2..1e6: " + ", ".join(f"{d:.3e}" for d in ds)
              + f"; three-point d = {d_fit:.12f} vs {d_ref:.12f}")


def test_07_state_reduction(criterion):
    ratio = width_ratio(REF)
    broad = width_ratio(REF.replace(dP0=1e6))
    criterion(7, ratio < 1.0 and broad < 1e-2, f"dP_c/dP0 = {ratio:.5f} at dP0=150 (< 1); {broad:.2e} at 1e6 (< 1e-2)")


def test_08_critical_width(criterion):
    parts, ok = [], True
    for dp in (10.0, 30.0, 60.0):
        setup = REF.replace(dp=dp)
        w = find_critical_width(setup)
        below = width_ratio(setup.replace(dP0=w * (1 - 1e-4))) - 1.0
        above = width_ratio(setup.replace(dP0=w * (1 + 1e-4))) - 1.0
        ok &= math.isfinite(w) and below > 0.0 > above
        parts.append(f"dp={dp:g}: {w:.4f}")
    w30 = find_critical_width(REF.replace(dp=30.0))
    ok &= w30 < 150.0
    criterion(8, ok, "critical dP0 " + ", ".join(parts) + " (sign change across each; dp=30 below 150)")


def test_09_oracle_equivalence(criterion):
    setup = desk_setup()
    report = oracle_check(setup, GridSpec.auto(setup, n=128))
    ok = report.max_error < 0.01 and report.norm_drift < 1e-8
    criterion(9, ok, f"n=128 max relative error = {report.max_error:.2e} (tol 1e-2), "
                     f"norm drift = {report.norm_drift:.1e} (tol 1e-8)")


def test_10_sampling_consistency(criterion):
    x1, x2 = sample_readouts(REF, 100_000, np.random.default_rng(7))
    p_out = assign_tof_value(REF, x1, x2)
    stderr = p_out.std(ddof=1) / math.sqrt(p_out.size)
    z = (p_out.mean() - REF.P0) / stderr
    criterion(10, abs(z) < 4.0, f"sample mean = {p_out.mean():.4f}, {z:+.2f} standard errors from P0 (tol 4)")
