import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curveflow import tolerances as tol
from curveflow.curve import (ClosedCurve, DegenerateParametrizationError, InvalidInputError,
                             RedistributionError, arclength_derivative, curvature, curve_from_dict,
                             curve_from_json, curve_from_text, curve_to_dict, curve_to_json,
                             curve_to_text, dissipation_norm, frame, hausdorff_distance, integrate,
                             reparametrize_arclength, spectral_derivative, summarize)
from curveflow.generators import al_symmetric, circle, ellipse, figure_eight, limacon


def grid(M):
    return np.arange(M) / M


def polygon_length(pts):
    return float(np.sum(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)))


def band_limited(rng, M):
    """Random smooth radial graph over the unit circle; coordinate modes stay <= M/8."""
    x = grid(M)
    r = np.ones(M)
    for f in range(2, M // 8):
        r += rng.uniform(-1, 1) * 0.1 / f**2 * np.cos(2 * np.pi * f * x + rng.uniform(0, 2 * np.pi))
    return ClosedCurve(np.column_stack((r * np.cos(2 * np.pi * x), r * np.sin(2 * np.pi * x))))


# -- construction ----------------------------------------------------------------

def test_rejects_non_power_of_two():
    with pytest.raises(InvalidInputError):
        ClosedCurve(np.random.default_rng(0).normal(size=(100, 2)))


def test_rejects_small_grid():
    with pytest.raises(InvalidInputError):
        ClosedCurve(circle(1, 1.0, M=16).samples[::2])


def test_rejects_coincident_samples():
    pts = circle(1, 1.0, M=32).samples.copy()
    pts[3] = pts[2]
    with pytest.raises(DegenerateParametrizationError):
        ClosedCurve(pts)


def test_samples_are_read_only():
    c = circle(1, 1.0, M=32)
    with pytest.raises(ValueError):
        c.samples[0, 0] = 5.0


# -- spectral derivative -----------------------------------------------------------

def test_derivative_of_single_mode():
    x = grid(64)
    d = spectral_derivative(np.sin(2 * np.pi * x), 1)
    assert np.max(np.abs(d - 2 * np.pi * np.cos(2 * np.pi * x))) < 1e-12


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivative_of_constant(order):
    assert np.max(np.abs(spectral_derivative(np.full(32, 3.7), order))) == 0.0


def test_second_derivative_of_exp_sin():
    x = grid(128)
    u = 2 * np.pi * x
    f = np.exp(np.sin(u))
    exact = 4 * np.pi**2 * f * (np.cos(u) ** 2 - np.sin(u))
    assert np.max(np.abs(spectral_derivative(f, 2) - exact)) < 1e-9


def test_derivative_rejects_bad_length():
    with pytest.raises(InvalidInputError):
        spectral_derivative(np.ones(48), 1)


def test_odd_derivative_drops_nyquist():
    x = np.arange(32)
    nyq = (-1.0) ** x
    assert np.max(np.abs(spectral_derivative(nyq, 1))) < 1e-12


def test_derivative_of_coordinate_array():
    c = circle(1, 2.0, M=64)
    d = spectral_derivative(c.samples, 1)
    assert d.shape == (64, 2)
    assert np.allclose(np.linalg.norm(d, axis=1), 4 * np.pi, atol=1e-11)


# -- curvature and arclength derivatives -------------------------------------------

@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_circle_curvature(r):
    assert np.max(np.abs(curvature(circle(1, r, M=128)) - 1 / r)) < 1e-10


def test_clockwise_circle_curvature():
    assert np.max(np.abs(curvature(circle(1, 1.0, M=128).reversed()) + 1)) < 1e-10


def test_ellipse_vertex_curvature():
    k = curvature(ellipse(2.0, 1.0, M=256))
    assert abs(k[0] - 2.0) < 1e-8


def test_ellipse_curvature_formula_everywhere():
    a, b = 2.0, 1.0
    t = 2 * np.pi * grid(256)
    exact = a * b / (a**2 * np.sin(t) ** 2 + b**2 * np.cos(t) ** 2) ** 1.5
    assert np.max(np.abs(curvature(ellipse(a, b, M=256)) - exact)) < 1e-8


def test_arclength_derivative_of_constant():
    c = ellipse(2.0, 1.0, M=128)
    assert np.max(np.abs(arclength_derivative(c, np.full(128, 2.5), 1))) < 1e-12


def test_arclength_derivative_chain_rule_on_circle():
    r = 1.7
    c = circle(1, r, M=128)
    theta = np.arctan2(c.y, c.x)
    d = arclength_derivative(c, np.sin(theta), 1)
    assert np.max(np.abs(d - np.cos(theta) / r)) < 1e-9


def test_arclength_second_derivative_unit_speed():
    # unit circle scaled to length 1 has unit speed
    c = circle(1, 1 / (2 * np.pi), M=128)
    x = grid(128)
    d = arclength_derivative(c, np.sin(2 * np.pi * x), 2)
    assert np.max(np.abs(d + 4 * np.pi**2 * np.sin(2 * np.pi * x))) < 1e-9


def test_arclength_derivative_rejects_wrong_length():
    with pytest.raises(InvalidInputError):
        arclength_derivative(circle(1, 1.0, M=64), np.ones(32), 1)


# -- summaries -----------------------------------------------------------------------

def test_unit_circle_summary():
    s = summarize(circle(1, 1.0, M=128))
    assert s.L == pytest.approx(2 * np.pi, abs=1e-12)
    assert s.A == pytest.approx(np.pi, abs=1e-12)
    assert s.N == 1
    assert s.kbar == pytest.approx(1.0, abs=1e-12)
    assert s.K_osc < 1e-20
    assert abs(s.D) < 1e-11
    assert s.I == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("N,r", [(2, 1.0), (3, 0.5), (4, 2.0)])
def test_multiple_circle_summary(N, r):
    s = summarize(circle(N, r, M=256))
    assert s.N == N
    assert s.L == pytest.approx(2 * np.pi * N * r, rel=1e-12)
    assert s.A == pytest.approx(N * np.pi * r**2, rel=1e-12)
    assert abs(s.D) < 1e-10 * s.L**2


def test_limacon_summary_against_dense_polygon():
    b = 0.5
    c = limacon(b, M=512)
    s = summarize(c)
    th = 2 * np.pi * np.arange(2**16) / 2**16
    r = b + np.cos(th)
    dense = np.column_stack((r * np.cos(th), r * np.sin(th)))
    L_ref = polygon_length(dense)
    assert s.N == 2
    assert s.A == pytest.approx(np.pi * (b**2 + 0.5), rel=1e-10)
    assert s.L == pytest.approx(L_ref, rel=1e-8)
    assert s.L == pytest.approx(6.68, abs=0.01)
    assert s.D < 0


def test_figure_eight_summary():
    s = summarize(figure_eight(M=256))
    assert s.N == 0
    assert abs(s.A) < 1e-12
    assert s.I is None


def test_ellipse_summary():
    s = summarize(ellipse(2.0, 1.0, M=256))
    assert s.A == pytest.approx(2 * np.pi, rel=1e-12)
    assert s.L == pytest.approx(9.688448, abs=1e-6)
    assert s.D == pytest.approx(14.909, abs=1e-3)


def test_by_construction_identities_are_exact():
    s = summarize(limacon(0.5, M=512))
    assert s.kbar * s.L == pytest.approx(2 * np.pi * s.N, rel=1e-15)
    assert s.D == s.L**2 - 4 * np.pi * s.N * s.A


def test_orientation_reversal():
    c = ellipse(2.0, 1.0, M=128)
    s, r = summarize(c), summarize(c.reversed())
    assert r.A == pytest.approx(-s.A, rel=1e-12)
    assert r.N == -s.N
    assert r.L == pytest.approx(s.L, rel=1e-13)
    assert r.K_osc == pytest.approx(s.K_osc, rel=1e-10)
    k = curvature(c)
    kr = curvature(c.reversed())
    assert np.allclose(kr, -np.roll(k[::-1], 1), atol=1e-10)


@pytest.mark.parametrize("lam", [0.1, 3.0])
def test_scaling(lam):
    c = al_symmetric((1, 3), 0.2, 1.0, M=128)
    s = summarize(c)
    t = summarize(ClosedCurve(lam * c.samples))
    assert t.L == pytest.approx(lam * s.L, rel=1e-12)
    assert t.A == pytest.approx(lam**2 * s.A, rel=1e-12)
    assert t.N == s.N
    assert t.K_osc == pytest.approx(s.K_osc, rel=1e-10)
    assert t.I == pytest.approx(s.I, rel=1e-12)
    assert t.D == pytest.approx(lam**2 * s.D, rel=1e-9)


def test_rigid_motion():
    c = limacon(0.5, M=256)
    th = 0.7
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    shift = np.array([1.5, -2.0])
    moved = ClosedCurve(c.samples @ R.T + shift)
    s, t = summarize(c), summarize(moved)
    for name in ("L", "A", "kbar", "K_osc", "D"):
        assert getattr(t, name) == pytest.approx(getattr(s, name), rel=1e-10, abs=1e-12)
    assert t.N == s.N
    assert np.allclose(t.centroid, R @ np.array(s.centroid) + shift, atol=1e-12)


def test_band_limited_summaries_converge():
    rng = np.random.default_rng(7)
    for _ in range(100):
        c = band_limited(rng, 128)
        fine = ClosedCurve(np.column_stack([
            _interp(c.samples[:, i], 256) for i in range(2)]))
        s, t = summarize(c), summarize(fine)
        for name in ("L", "A", "K_osc"):
            assert getattr(t, name) == pytest.approx(getattr(s, name), rel=1e-8, abs=1e-14)
        assert s.N == t.N


def _interp(values, M_new):
    M = values.size
    F = np.fft.fft(values)
    G = np.zeros(M_new, dtype=complex)
    G[: M // 2] = F[: M // 2]
    G[-M // 2 + 1:] = F[-M // 2 + 1:]
    G[M // 2] = F[M // 2] / 2
    G[-M // 2] = F[M // 2] / 2
    return np.real(np.fft.ifft(G)) * M_new / M


def test_summarize_rejects_under_resolved_curve():
    rng = np.random.default_rng(1)
    pts = circle(1, 1.0, M=32).samples + 0.3 * rng.normal(size=(32, 2))
    with pytest.raises(Exception):
        summarize(ClosedCurve(pts))


# -- inequalities as curve properties ---------------------------------------------------

def _norms(curve, m):
    fr = frame(curve)
    s = summarize(curve)
    from curveflow.curve import curvature_deviation_derivative
    d_m = curvature_deviation_derivative(fr, s.kbar, m)
    d_m1 = curvature_deviation_derivative(fr, s.kbar, m + 1)
    return s, integrate(fr.speed, d_m**2), integrate(fr.speed, d_m1**2), np.max(np.abs(d_m))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_band_limited_inequalities(seed):
    c = band_limited(np.random.default_rng(seed), 128)
    fr = frame(c)
    assert integrate(fr.speed, np.abs(fr.k)) >= 2 * np.pi - 1e-8
    for m in (0, 1, 2):
        s, a, b, sup = _norms(c, m)
        assert tol.holds(a, s.L**2 / (4 * np.pi**2) * b)
        assert tol.holds(sup**2, s.L / (2 * np.pi) * b)
    s = summarize(c)
    assert tol.holds(4 * np.pi**2 * s.N / s.L**2 * abs(s.D), s.K_osc)


# -- dissipation norm ---------------------------------------------------------------------

@pytest.mark.parametrize("m", [0, 1, 2])
def test_circle_dissipation_vanishes(m):
    assert dissipation_norm(circle(2, 0.7, M=128), m) < 1e-10


@pytest.mark.parametrize("ell,n,eps", [(1, 2, 0.1), (2, 3, 0.05), (1, 3, 0.2)])
def test_tangent_angle_dissipation(ell, n, eps):
    c = al_symmetric((ell, n), eps, 1.0, M=256)
    assert dissipation_norm(c, 0) == pytest.approx(2 * np.pi**2 * n**2 * eps**2, rel=1e-9)
    assert dissipation_norm(c, 1) == pytest.approx(8 * np.pi**4 * n**4 * eps**2, rel=1e-9)


# -- reparametrization ------------------------------------------------------------------------

def test_reparametrize_uniform_circle_is_identity():
    c = circle(1, 1.0, M=128)
    assert np.max(np.abs(reparametrize_arclength(c).samples - c.samples)) < 1e-12


def test_reparametrize_ellipse():
    c = ellipse(2.0, 1.0, M=256)
    r = reparametrize_arclength(c)
    speed = frame(r).speed
    assert np.max(np.abs(speed / speed.mean() - 1)) < 1e-8
    s, t = summarize(c), summarize(r)
    assert t.A == pytest.approx(2 * np.pi, rel=1e-9)
    assert t.L == pytest.approx(s.L, rel=1e-8)
    assert t.N == s.N


def test_reparametrize_evens_out_mesh_ratio_three():
    x = grid(128)
    # speed 1 + 0.5 cos gives segment ratio close to 3
    u = x + 0.5 / (2 * np.pi) * np.sin(2 * np.pi * x)
    c = ClosedCurve(np.column_stack((np.cos(2 * np.pi * u), np.sin(2 * np.pi * u))))
    assert c.mesh_ratio() == pytest.approx(3.0, rel=0.01)
    assert reparametrize_arclength(c).mesh_ratio() < 1.001


def test_reparametrize_refuses_extreme_mesh():
    x = grid(64)
    u = x + 0.999 / (2 * np.pi) * np.sin(2 * np.pi * x)
    c = ClosedCurve(np.column_stack((np.cos(2 * np.pi * u), np.sin(2 * np.pi * u))))
    assert c.mesh_ratio() > 100
    with pytest.raises(RedistributionError):
        reparametrize_arclength(c)


# -- Hausdorff distance ---------------------------------------------------------------------------

def test_hausdorff_same_trace_different_parametrization():
    c = ellipse(2.0, 1.0, M=128)
    assert hausdorff_distance(c, reparametrize_arclength(c)) < 1e-10


def test_hausdorff_concentric_circles():
    assert hausdorff_distance(circle(1, 1.0, M=64), circle(1, 1.25, M=128)) == \
        pytest.approx(0.25, abs=1e-10)


# -- serialization ----------------------------------------------------------------------------------

def test_json_round_trip():
    c = limacon(0.5, M=128)
    back = curve_from_json(curve_to_json(c))
    assert np.array_equal(back.samples, c.samples)
    data = json.loads(curve_to_json(c))
    assert data["m_samples"] == 128 and len(data["points"]) == 128


def test_dict_and_text_round_trip():
    c = ellipse(2.0, 1.0, M=64)
    assert np.array_equal(curve_from_dict(curve_to_dict(c)).samples, c.samples)
    text = curve_to_text(c)
    assert text.endswith("\n") and len(text.splitlines()) == 64
    assert np.array_equal(curve_from_text(text).samples, c.samples)


def test_dict_with_wrong_count_rejected():
    data = curve_to_dict(circle(1, 1.0, M=32))
    data["m_samples"] = 64
    with pytest.raises(InvalidInputError):
        curve_from_dict(data)
