"""Discrete differential geometry of closed planar curves.

A curve is stored as ``M`` samples of ``gamma: S^1 -> R^2`` on the uniform
parameter grid ``x_i = i / M``.  Parameter derivatives are spectral (FFT),
integrals use the trapezoid rule, which is spectrally accurate for periodic
integrands.

Sign conventions: a counterclockwise circle has positive curvature, the unit
normal ``nu`` is the tangent rotated by +90 degrees (so it points inward on a
counterclockwise circle) and ``gamma_ss = k nu``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial import cKDTree

from . import tolerances as tol

log = logging.getLogger(__name__)


class CurveError(ValueError):
    """Base class for errors raised by the geometry routines."""


class InvalidInputError(CurveError):
    pass


class DegenerateParametrizationError(CurveError):
    pass


class UnderResolvedCurveError(CurveError):
    pass


class RedistributionError(CurveError):
    pass


def check_grid_size(M: int) -> None:
    if M < 16 or M & (M - 1):
        raise InvalidInputError(f"grid size must be a power of two >= 16, got {M}")


def _segments(points: np.ndarray) -> np.ndarray:
    return np.hypot(*(np.roll(points, -1, axis=0) - points).T)


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Immersed closed planar curve sampled on ``M`` uniform parameter nodes.

    ``samples`` has shape ``(M, 2)`` and is stored as a read-only copy.
    """

    samples: np.ndarray

    def __post_init__(self):
        pts = np.array(self.samples, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInputError(f"samples must have shape (M, 2), got {pts.shape}")
        check_grid_size(pts.shape[0])
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("samples contain non-finite values")
        if _segments(pts).min() <= 0.0:
            raise DegenerateParametrizationError("consecutive samples coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "samples", pts)

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.samples[:, 1]

    def segment_lengths(self) -> np.ndarray:
        return _segments(self.samples)

    def mesh_ratio(self) -> float:
        seg = self.segment_lengths()
        return float(seg.max() / seg.min())

    def reversed(self) -> "ClosedCurve":
        """Same trace traversed backwards, ``x -> -x``."""
        return ClosedCurve(np.roll(self.samples[::-1], 1, axis=0))

    def __repr__(self) -> str:
        return f"ClosedCurve(M={self.M})"


# ---------------------------------------------------------------------------
# spectral calculus


def _wavenumbers(M: int) -> np.ndarray:
    return np.arange(M // 2 + 1, dtype=float)


def spectral_derivative(values, order: int = 1, *, cutoff: Optional[float] = None) -> np.ndarray:
    """Parameter derivative of a periodic sample array on ``S^1 = R/Z``.

    Mode ``j`` is multiplied by ``(2 pi i j)**order``; the Nyquist mode is
    dropped for odd orders.  ``values`` may be ``(M,)`` or ``(M, d)``, the
    derivative is taken along axis 0.

    If ``cutoff`` is given, Fourier coefficients whose amplitude is below
    ``cutoff`` are zeroed first.
    """
    if order < 0:
        raise InvalidInputError("derivative order must be >= 0")
    f = np.asarray(values, dtype=float)
    M = f.shape[0]
    check_grid_size(M)
    fh = np.fft.rfft(f, axis=0)
    if cutoff is not None:
        fh[np.abs(fh) < cutoff * M] = 0.0
    if order == 0:
        return np.fft.irfft(fh, n=M, axis=0)
    mult = (2j * np.pi * _wavenumbers(M)) ** order
    if order % 2:
        mult[-1] = 0.0
    if f.ndim > 1:
        mult = mult.reshape((-1,) + (1,) * (f.ndim - 1))
    return np.fft.irfft(fh * mult, n=M, axis=0)


def _cutoff(f: np.ndarray) -> float:
    return tol.FILTER_LEVEL * float(np.max(np.abs(f)))


def filtered(values) -> np.ndarray:
    """Drop Fourier modes at roundoff level relative to ``max|values|``."""
    f = np.asarray(values, dtype=float)
    return spectral_derivative(f, 0, cutoff=_cutoff(f))


def resample(values, M_new: int) -> np.ndarray:
    """Band-limited (Fourier) interpolation of periodic samples onto ``M_new`` nodes."""
    f = np.asarray(values, dtype=float)
    M = f.shape[0]
    check_grid_size(M)
    check_grid_size(M_new)
    c = np.fft.rfft(f, axis=0)
    out = np.zeros((M_new // 2 + 1,) + f.shape[1:], dtype=complex)
    if M_new >= M:
        c[M // 2] *= 0.5 if M_new > M else 1.0
        out[: M // 2 + 1] = c
    else:
        out[:] = c[: M_new // 2 + 1]
        out[-1] = out[-1].real
    return np.fft.irfft(out, n=M_new, axis=0) * (M_new / M)


class Frame(NamedTuple):
    """Pointwise differential data of a sampled curve."""

    speed: np.ndarray      # |gamma_x|
    tangent: np.ndarray    # (M, 2)
    normal: np.ndarray     # (M, 2), tangent rotated by +90 degrees
    k: np.ndarray          # signed curvature


def frame(points) -> Frame:
    """Speed, unit tangent, unit normal and curvature of a sampled curve.

    Accepts a :class:`ClosedCurve` or a raw ``(M, 2)`` array (the latter skips
    validation, which the time steppers rely on).
    """
    pts = points.samples if isinstance(points, ClosedCurve) else np.asarray(points, dtype=float)
    fh = np.fft.rfft(pts, axis=0)
    M = pts.shape[0]
    fh[np.abs(fh) < _cutoff(pts) * M] = 0.0
    ik = (2j * np.pi * _wavenumbers(M))[:, None]
    d1 = ik.copy()
    d1[-1] = 0.0
    gx = np.fft.irfft(fh * d1, n=M, axis=0)
    gxx = np.fft.irfft(fh * ik**2, n=M, axis=0)
    speed = np.hypot(gx[:, 0], gx[:, 1])
    if speed.min() < tol.SPEED_DEGENERATE * speed.mean():
        raise DegenerateParametrizationError("|gamma_x| vanishes somewhere")
    tangent = gx / speed[:, None]
    normal = np.column_stack((-tangent[:, 1], tangent[:, 0]))
    k = (gx[:, 0] * gxx[:, 1] - gx[:, 1] * gxx[:, 0]) / speed**3
    return Frame(speed, tangent, normal, filtered(k))


def curvature(curve: ClosedCurve) -> np.ndarray:
    """Signed curvature ``k = (gamma_x x gamma_xx) / |gamma_x|^3`` at each sample."""
    return frame(curve).k


def _arclength_derivative(field: np.ndarray, speed: np.ndarray, j: int) -> np.ndarray:
    g = np.asarray(field, dtype=float)
    for _ in range(j):
        g = spectral_derivative(g, 1, cutoff=_cutoff(g)) / speed
    return g


def arclength_derivative(curve: ClosedCurve, field, j: int = 1) -> np.ndarray:
    """``d^j f / ds^j`` by ``j``-fold application of ``|gamma_x|^{-1} d/dx``."""
    field = np.asarray(field, dtype=float)
    if field.shape != (curve.M,):
        raise InvalidInputError(f"field has shape {field.shape}, curve has M={curve.M}")
    if j < 1:
        raise InvalidInputError("j must be >= 1")
    return _arclength_derivative(field, frame(curve).speed, j)


def integrate(speed: np.ndarray, f) -> float:
    """``int f ds`` by the trapezoid rule on the uniform grid."""
    return float(np.mean(np.asarray(f) * speed))


def turning_number(points) -> int:
    """Total turning of the sample polygon's edge vectors divided by ``2 pi``.

    Exactly integer-valued for any closed polygon without reversing edges.
    """
    pts = points.samples if isinstance(points, ClosedCurve) else np.asarray(points)
    d = np.roll(pts, -1, axis=0) - pts
    z = d[:, 0] + 1j * d[:, 1]
    turns = np.angle(np.roll(z, -1) * np.conj(z))
    return int(round(float(np.sum(turns)) / (2 * np.pi)))


# ---------------------------------------------------------------------------
# scalar invariants


@dataclass(frozen=True)
class GeometricSummary:
    L: float
    A: float
    N: int
    kbar: float
    K_osc: float
    D: float
    I: Optional[float]
    centroid: tuple


def rotation_number(curve: ClosedCurve, fr: Optional[Frame] = None) -> int:
    """Rotation number from discrete turning, cross-checked against ``int k ds / 2 pi``."""
    fr = fr or frame(curve)
    total = integrate(fr.speed, fr.k) / (2 * np.pi)
    n_int = round(total)
    if abs(total - n_int) > tol.TURNING_TOL:
        raise UnderResolvedCurveError(f"total turning {total:.6f} is not close to an integer")
    n_turn = turning_number(curve)
    if n_turn != n_int:
        raise UnderResolvedCurveError(
            f"polygon turning {n_turn} disagrees with integrated curvature {total:.6f}")
    return int(n_int)


def signed_area(curve: ClosedCurve, fr: Optional[Frame] = None) -> float:
    """``A = -1/2 int <gamma, nu> ds``; positive for counterclockwise embedded curves."""
    fr = fr or frame(curve)
    p = curve.samples
    return -0.5 * integrate(fr.speed, np.einsum("ij,ij->i", p, fr.normal))


def summarize(curve: ClosedCurve) -> GeometricSummary:
    fr = frame(curve)
    L = float(np.mean(fr.speed))
    A = signed_area(curve, fr)
    N = rotation_number(curve, fr)
    kbar = 2 * np.pi * N / L
    K_osc = L * integrate(fr.speed, (fr.k - kbar) ** 2)
    D = L**2 - 4 * np.pi * N * A
    I = L**2 / (4 * np.pi * A) if A > 0 else None
    c = np.mean(curve.samples * fr.speed[:, None], axis=0) / L
    return GeometricSummary(L, A, N, kbar, K_osc, D, I, (float(c[0]), float(c[1])))


def curvature_deviation_derivative(fr: Frame, kbar: float, j: int) -> np.ndarray:
    """``(k - kbar)_{s^j}``; for ``j >= 1`` the constant drops out."""
    if j == 0:
        return fr.k - kbar
    return _arclength_derivative(fr.k, fr.speed, j)


def dissipation_norm(curve: ClosedCurve, m: int, N: Optional[int] = None) -> float:
    """``int ((k - kbar)_{s^m})^2 ds``, the length dissipation rate of the order-m flow."""
    if m < 0:
        raise InvalidInputError("m must be >= 0")
    fr = frame(curve)
    L = float(np.mean(fr.speed))
    if N is None:
        N = rotation_number(curve, fr)
    g = curvature_deviation_derivative(fr, 2 * np.pi * N / L, m)
    return integrate(fr.speed, g**2)


def spectral_tail(curve: ClosedCurve) -> float:
    """Fraction of coordinate spectral amplitude carried by the top quarter of modes."""
    p = curve.samples - curve.samples.mean(axis=0)
    c = np.abs(np.fft.rfft(p, axis=0)).sum(axis=1)
    return float(c[3 * curve.M // 8:].sum() / c.sum())


def is_degraded(curve: ClosedCurve) -> bool:
    return curve.mesh_ratio() > tol.MESH_RATIO_SPECTRAL or spectral_tail(curve) > tol.SPECTRAL_TAIL


# ---------------------------------------------------------------------------
# redistribution

_OVERSAMPLE = 16
_STENCIL = 12
_BARY = np.array([(-1) ** j * math.comb(_STENCIL - 1, j) for j in range(_STENCIL)], dtype=float)


def _upsample(values: np.ndarray, factor: int) -> np.ndarray:
    M = values.shape[0]
    c = np.fft.rfft(values, axis=0)
    c[M // 2] *= 0.5
    out = np.zeros((M * factor // 2 + 1,) + values.shape[1:], dtype=complex)
    out[: M // 2 + 1] = c
    return np.fft.irfft(out, n=M * factor, axis=0) * factor


def _interp_periodic(fine: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Local barycentric Lagrange interpolation on a periodic unit-spaced grid."""
    F = fine.shape[0]
    base = np.floor(u).astype(np.int64) - (_STENCIL // 2 - 1)
    nodes = base[:, None] + np.arange(_STENCIL)
    d = u[:, None] - nodes
    hit = d == 0.0
    d[hit] = 1.0
    w = _BARY / d
    vals = fine[nodes % F]
    if fine.ndim == 1:
        out = np.sum(w * vals, axis=1) / np.sum(w, axis=1)
    else:
        out = np.einsum("ij,ijk->ik", w, vals) / np.sum(w, axis=1)[:, None]
    rows = np.any(hit, axis=1)
    if np.any(rows):
        out[rows] = vals[rows, np.argmax(hit[rows], axis=1)]
    return out


def reparametrize_arclength(curve: ClosedCurve) -> ClosedCurve:
    """Resample the same trace at points equispaced in arclength.

    The cumulative arclength is integrated spectrally and inverted by Newton
    iteration; curve and arclength are evaluated off-grid through 16x Fourier
    oversampling followed by 12-point local interpolation, which is accurate
    to roundoff for resolved curves.  Sample 0 is kept fixed.
    """
    ratio = curve.mesh_ratio()
    if ratio > tol.MESH_RATIO_REFUSE:
        raise RedistributionError(f"mesh ratio {ratio:.3g} too large to redistribute")
    M = curve.M
    F = M * _OVERSAMPLE
    speed = frame(curve).speed
    L = float(np.mean(speed))

    ch = np.fft.rfft(speed)
    j = _wavenumbers(M)
    sh = np.zeros_like(ch)
    sh[1:-1] = ch[1:-1] / (2j * np.pi * j[1:-1])
    s_per = np.fft.irfft(sh, n=M)

    s_fine = _upsample(s_per, _OVERSAMPLE)
    v_fine = _upsample(speed, _OVERSAMPLE)
    p_fine = _upsample(curve.samples, _OVERSAMPLE)
    s0 = s_per[0]

    target = np.arange(M) * (L / M)
    xf = np.arange(F + 1) / F
    s_tab = L * xf + np.append(s_fine, s_fine[0]) - s0
    x = np.interp(target, s_tab, xf)
    for _ in range(8):
        u = x * F
        resid = L * x + _interp_periodic(s_fine, u) - s0 - target
        step = resid / _interp_periodic(v_fine, u)
        x = x - step
        if np.max(np.abs(step)) < 1e-14:
            break
    x[0] = 0.0
    return ClosedCurve(_interp_periodic(p_fine, x * F))


def _trig_eval(coef: np.ndarray, freq: np.ndarray, u: np.ndarray, chunk: int = 512):
    """Complex trigonometric interpolant and its first two derivatives at ``u``."""
    out = np.empty((3, u.size), dtype=complex)
    w = 2j * np.pi * freq
    for i in range(0, u.size, chunk):
        E = np.exp(np.outer(u[i:i + chunk], w)) * coef
        out[0, i:i + chunk] = E.sum(axis=1)
        out[1, i:i + chunk] = E @ w
        out[2, i:i + chunk] = E @ w**2
    return out


def _distance_to_trace(points: np.ndarray, curve: ClosedCurve, oversample: int) -> np.ndarray:
    """Distance from each point to the spectral interpolant of ``curve``."""
    M = curve.M
    z = curve.x + 1j * curve.y
    coef = np.fft.fft(z) / M
    coef[M // 2] = 0.0
    freq = np.fft.fftfreq(M, 1.0 / M)
    dense = _upsample(curve.samples, oversample)
    _, idx = cKDTree(dense).query(points)
    u = idx / dense.shape[0]
    p = points[:, 0] + 1j * points[:, 1]
    for _ in range(8):
        b, b1, b2 = _trig_eval(coef, freq, u)
        r = b - p
        f = (r * b1.conj()).real
        fp = np.abs(b1) ** 2 + (r * b2.conj()).real
        du = np.where(fp > 0, f / np.where(fp > 0, fp, 1.0), 0.0)
        u = u - du
        if np.max(np.abs(du)) < 1e-15:
            break
    return np.abs(_trig_eval(coef, freq, u)[0] - p)


def hausdorff_distance(a: ClosedCurve, b: ClosedCurve, oversample: Optional[int] = None) -> float:
    """Hausdorff distance between two traces.

    Each trace is densified spectrally and every dense point is projected onto
    the other trace's trigonometric interpolant by Newton's method, so the
    result does not depend on how the two curves are parametrized.
    """
    if oversample is None:
        oversample = max(2, min(8, 4096 // max(a.M, b.M)))
    pa = _upsample(a.samples, oversample)
    pb = _upsample(b.samples, oversample)
    return float(max(_distance_to_trace(pa, b, oversample).max(),
                     _distance_to_trace(pb, a, oversample).max()))


# ---------------------------------------------------------------------------
# snapshots


def curve_to_dict(curve: ClosedCurve) -> dict:
    return {"m_samples": curve.M, "points": curve.samples.tolist()}


def curve_from_dict(data: dict) -> ClosedCurve:
    try:
        pts = np.asarray(data["points"], dtype=float)
        M = int(data["m_samples"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed curve snapshot: {exc}") from None
    if pts.shape[0] != M:
        raise InvalidInputError(f"m_samples={M} but {pts.shape[0]} points given")
    return ClosedCurve(pts)


def curve_to_json(curve: ClosedCurve) -> str:
    return json.dumps(curve_to_dict(curve))


def curve_from_json(text: str) -> ClosedCurve:
    return curve_from_dict(json.loads(text))


def curve_to_text(curve: ClosedCurve) -> str:
    return "".join(f"{x!r} {y!r}\n" for x, y in curve.samples.tolist())


def curve_from_text(text: str) -> ClosedCurve:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if any(len(r) != 2 for r in rows):
        raise InvalidInputError("each line must hold exactly two numbers")
    return ClosedCurve(np.array(rows, dtype=float))
