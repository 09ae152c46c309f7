"""Unit tests of the fitters and of every checker on constructed conformers and violations."""

import json
from dataclasses import replace

import numpy as np
import pytest

from curveflow import tolerances as tol
from curveflow.diagnostics import (CHECKERS, Outcome, RunResult, Verdict, WindowError, _gap,
                                   check_area_conservation, check_blowup_consistency,
                                   check_blowup_exponent, check_centroid_convergence,
                                   check_defect_decay, check_dissipation_identity,
                                   check_expected_status, check_immortal_isoperimetry,
                                   check_inequalities, check_kosc_decay, check_kosc_identity,
                                   check_length_monotonicity, check_rotation_conservation,
                                   check_stationarity, check_symmetry_preservation,
                                   fit_blowup_exponent, fit_exponential_rate, inequality_suite,
                                   kosc_identity_rhs, reference_rate, register_checker)
from curveflow.generators import circle, ellipse, limacon
from curveflow.trajectory import TrajectoryLog

L0 = 2 * np.pi
A0 = np.pi


def synthetic(t, status="converged", m=0, N0=1, L0=L0, A0=A0, **cols):
    meta = {"m": m, "N0": N0, "L0": L0, "A0": A0, "status": status}
    return TrajectoryLog.from_columns(meta, t=t, **cols)


def with_records(log, **columns):
    recs = [replace(r, **{k: v[i] for k, v in columns.items()}) for i, r in enumerate(log.records)]
    return TrajectoryLog(recs, dict(log.meta))


# -- rates --------------------------------------------------------------------------------------

def test_reference_rate_examples():
    assert reference_rate(2 * np.pi, 0) == pytest.approx(1.0)
    assert reference_rate(2 * np.pi, 1) == pytest.approx(1.0)
    assert reference_rate(4 * np.pi, 1) == pytest.approx(0.0625)


def test_fit_exact_exponential():
    t = np.linspace(0, 4, 50)
    assert fit_exponential_rate(t, 5 * np.exp(-3 * t)).rate == pytest.approx(3, abs=1e-10)


def test_fit_constant():
    t = np.linspace(0, 4, 50)
    assert abs(fit_exponential_rate(t, np.full(50, 2.5)).rate) < 1e-12


def test_fit_modulated_exponential():
    t = np.linspace(0, 5, 501)
    v = np.exp(-2 * t) * (1 + 0.01 * np.sin(5 * t))
    assert fit_exponential_rate(t, v).rate == pytest.approx(2, abs=0.02)


def test_fit_window_fractions():
    t = np.linspace(0, 10, 101)
    v = np.where(t < 5, np.exp(-t), np.exp(-5) * np.exp(-2 * (t - 5)))
    fit = fit_exponential_rate(t, v, window=(0.6, 1.0))
    assert fit.rate == pytest.approx(2, abs=1e-10)
    assert fit.window[0] >= 6 - 1e-12


def test_fit_rejects_nonpositive_and_short():
    t = np.linspace(0, 1, 20)
    with pytest.raises(WindowError):
        fit_exponential_rate(t, np.where(t > 0.8, -1.0, 1.0))
    with pytest.raises(WindowError):
        fit_exponential_rate(t[:8], np.exp(-t[:8]), window=(0.0, 1.0))


def test_blowup_fit_synthetic_oracle():
    T = 0.37
    t = T - np.geomspace(1e-1, 1e-6, 60)
    fit = fit_blowup_exponent(t, (T - t) ** -0.5)
    assert fit.exponent == pytest.approx(0.5, abs=1e-3)
    assert fit.T_star == pytest.approx(T, rel=1e-4)


def test_blowup_fit_needs_points():
    t = np.linspace(0, 1, 5)
    with pytest.raises(WindowError):
        fit_blowup_exponent(t, 1 / (1.1 - t))


# -- verdict shape ----------------------------------------------------------------------------

def test_verdict_serializes():
    v = Verdict("x", Outcome.PASS, {"a": np.float64(1.5), "b": [np.int64(2)]}, {"t": 1.0}, (0.0, 1.0))
    d = v.to_dict()
    assert set(d) == {"check_name", "outcome", "fitted", "thresholds", "window", "message"}
    assert json.loads(json.dumps(d)) == d
    assert d["outcome"] == "pass" and v.passed and not v.failed


# -- checker self-validation: each checker passes a conformer and fails a violation -------------

T = np.linspace(0, 10, 201)


def test_area_conservation():
    assert check_area_conservation(synthetic(T, A=np.full_like(T, A0))).passed
    assert check_area_conservation(synthetic(T, A=A0 * (1 + 1e-3 * T))).failed


def test_length_monotonicity():
    assert check_length_monotonicity(synthetic(T, L=L0 * (1 + np.exp(-T)))).passed
    assert check_length_monotonicity(synthetic(T, L=L0 * (1 + 1e-6 * np.sin(T)))).failed


def test_rotation_conservation():
    log = synthetic(T)
    assert check_rotation_conservation(log).passed
    N = [1] * 100 + [2] * (T.size - 100)
    assert check_rotation_conservation(with_records(log, N=N)).failed


def test_symmetry_preservation():
    log = synthetic(T)
    small = with_records(log, symmetry_residual=np.full(T.size, 1e-13))
    assert check_symmetry_preservation(small).passed
    grow = with_records(log, symmetry_residual=np.concatenate(([1e-13], np.full(T.size - 1, 1e-3))))
    assert check_symmetry_preservation(grow).failed
    assert check_symmetry_preservation(log).outcome is Outcome.NOT_APPLICABLE


def test_dissipation_identity():
    t = np.linspace(0, 2, 201)
    L = L0 + np.exp(-t)
    assert check_dissipation_identity(synthetic(t, L=L, dissipation=np.exp(-t))).passed
    assert check_dissipation_identity(synthetic(t, L=L, dissipation=1.1 * np.exp(-t))).failed


def test_defect_decay():
    c = reference_rate(L0, 0)
    D0 = 2.0
    good = synthetic(T, D=D0 * np.exp(-2 * c * T))
    bad = synthetic(T, D=D0 * np.exp(-0.5 * 2 * c * T))
    assert check_defect_decay(good).passed
    assert check_defect_decay(bad).failed
    assert check_defect_decay(synthetic(T, D=np.zeros_like(T))).passed
    assert check_defect_decay(synthetic(T, status="blown_up")).outcome is Outcome.NOT_APPLICABLE


def test_kosc_decay():
    c = reference_rate(L0, 0)
    t = np.linspace(0.1, 20, 400)
    good = synthetic(t, K_osc=np.exp(-c * t), kdev_inf=np.exp(-0.5 * c * t))
    bad = synthetic(t, K_osc=1 / t, kdev_inf=1 / t)
    assert check_kosc_decay(good)[1].passed
    assert check_kosc_decay(bad)[1].failed


def test_kosc_decay_inconclusive_when_floored():
    t = np.linspace(0, 20, 400)
    log = synthetic(t, K_osc=np.where(t < 0.2, 1.0, 0.0), kdev_inf=np.where(t < 0.2, 1.0, 0.0))
    assert check_kosc_decay(log)[1].outcome is Outcome.INCONCLUSIVE


def test_centroid_convergence():
    c = reference_rate(L0, 0)
    t = np.linspace(0, 20, 401)
    settle = synthetic(t, centroid_x=0.1 * np.exp(-c * t), centroid_y=0.05 * np.exp(-0.5 * c * t))
    drift = synthetic(t, centroid_x=1e-3 * t)
    pinned = synthetic(t)
    assert check_centroid_convergence(settle).passed
    assert check_centroid_convergence(drift).failed
    assert check_centroid_convergence(pinned).outcome is Outcome.INCONCLUSIVE


def test_blowup_exponent():
    Ts = 0.2
    t = Ts - np.geomspace(0.1, 1e-6, 80)
    good = synthetic(t, status="blown_up", N0=0, A0=0.0, ksq=(Ts - t) ** -0.5)
    weak = synthetic(t, status="blown_up", N0=0, A0=0.0, ksq=(Ts - t) ** -0.1)
    assert check_blowup_exponent(good)[1].passed
    assert check_blowup_exponent(weak)[1].failed
    assert check_blowup_exponent(synthetic(t))[1].outcome is Outcome.NOT_APPLICABLE


def test_immortal_isoperimetry():
    L = np.sqrt(4 * np.pi * A0) * (1 + np.exp(-T))
    L[-1] = np.sqrt(4 * np.pi * A0) * (1 + 1e-6)
    assert check_immortal_isoperimetry(synthetic(T, L=L, A=np.full_like(T, A0))).passed
    short = np.sqrt(4 * np.pi * A0) * (1 - 1e-3) * np.ones_like(T)
    assert check_immortal_isoperimetry(synthetic(T, L=short, A=np.full_like(T, A0))).failed


def test_expected_status():
    assert check_expected_status(synthetic(T), ["converged"]).passed
    assert check_expected_status(synthetic(T, status="aborted"), "converged").failed


def test_blowup_consistency():
    assert check_blowup_consistency(synthetic(T, status="blown_up", N0=0, A0=0.0)).passed
    assert check_blowup_consistency(synthetic(T, status="converged", N0=0, A0=0.0)).failed
    log = synthetic(T, L=np.full_like(T, L0), A=np.full_like(T, A0))
    assert check_blowup_consistency(log).outcome is Outcome.NOT_APPLICABLE


def test_stationarity():
    c = circle(2, 1.0, M=128)
    assert check_stationarity(c, c, 1).passed
    assert check_stationarity(ellipse(2.0, 1.0, 128), ellipse(2.1, 1.0, 128), 0).failed


def test_inequalities_conformer_and_violation():
    assert all(v.passed for v in check_inequalities(ellipse(2.0, 1.0, 256)))
    # the checkers share this predicate; a right-hand side short by 1e-6 must fail it
    assert not tol.holds(1.0 + 1e-6, 1.0)
    assert tol.holds(1.0 + 1e-9, 1.0)


def test_inequalities_on_circle_are_equalities():
    vs = {v.check: v for v in check_inequalities(circle(1, 1.0, M=128))}
    assert all(v.passed for v in vs.values())
    assert vs["fenchel"].values["rhs"] == pytest.approx(2 * np.pi, rel=1e-12)
    assert vs["defect_estimate"].values["lhs"] < 1e-10


def test_limacon_passes_defect_estimate():
    vs = {v.check: v for v in check_inequalities(limacon(0.5, 1024))}
    assert vs["defect_estimate"].values["D"] < 0
    assert vs["defect_estimate"].passed


def test_kosc_identity_circle_and_mismatch():
    r = check_kosc_identity(circle(1, 1.0, M=128), 0)
    assert abs(r.lhs) < 1e-9 and abs(r.rhs) < 1e-9 and r.gap == 0.0
    # the m = 1 formula does not describe the m = 0 flow
    e = ellipse(2.0, 1.0, 256)
    assert _gap(kosc_identity_rhs(e, 0), kosc_identity_rhs(e, 1), 1e-12) > 0.5


def test_inequality_suite_small():
    v = inequality_suite(seed=3, n_random=5)
    assert v.passed and v.values["checked"] > 5 * 8


def test_registry_dispatch():
    c = circle(1, 1.0, M=64)
    r = RunResult(synthetic(T, A=np.full_like(T, A0)), c, c)
    assert CHECKERS["area_conservation"](r, rel=1e-6).passed
    register_checker("always", lambda run, **kw: Verdict("always", Outcome.PASS))
    try:
        assert CHECKERS["always"](r).passed
    finally:
        del CHECKERS["always"]
