"""Initial curves: circles, ellipses, limacons, figure-eights and symmetric curves."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .curve import (ClosedCurve, CurveError, InvalidInputError, check_grid_size, frame,
                    reparametrize_arclength, summarize)

log = logging.getLogger(__name__)

EPS_MAX = 8.0


class ConstructionError(CurveError):
    pass


class BracketError(CurveError):
    pass


@dataclass(frozen=True)
class SymmetrySpec:
    """Abresch-Langer class ``A_{ell,n}``: ``gamma(x + 1/n) = R(2 pi ell / n) gamma(x)``."""

    ell: int
    n: int

    def __post_init__(self):
        if not (isinstance(self.ell, (int, np.integer)) and isinstance(self.n, (int, np.integer))):
            raise InvalidInputError("ell and n must be integers")
        if not (self.n >= self.ell >= 1):
            raise InvalidInputError(f"need n >= ell >= 1, got ell={self.ell}, n={self.n}")

    @property
    def angle(self) -> float:
        return 2 * np.pi * self.ell / self.n

    @classmethod
    def coerce(cls, value) -> "SymmetrySpec":
        if isinstance(value, SymmetrySpec):
            return value
        if isinstance(value, dict):
            return cls(int(value["ell"]), int(value["n"]))
        ell, n = value
        return cls(int(ell), int(n))


def symmetry_residual(curve: ClosedCurve, sym: SymmetrySpec) -> float:
    """``max_x |gamma(x + 1/n) - R gamma(x)|`` after centering at the centroid.

    The parameter shift is applied spectrally, so ``n`` need not divide ``M``.
    """
    sym = SymmetrySpec.coerce(sym)
    c = summarize_centroid(curve)
    z = (curve.x - c[0]) + 1j * (curve.y - c[1])
    M = curve.M
    j = np.fft.fftfreq(M, 1.0 / M)
    zh = np.fft.fft(z)
    zh[M // 2] = 0.0
    shifted = np.fft.ifft(zh * np.exp(2j * np.pi * j / sym.n))
    return float(np.max(np.abs(shifted - np.exp(1j * sym.angle) * z)))


def summarize_centroid(curve: ClosedCurve) -> tuple:
    speed = frame(curve).speed
    c = np.mean(curve.samples * speed[:, None], axis=0) / np.mean(speed)
    return float(c[0]), float(c[1])


def _grid(M: int) -> np.ndarray:
    check_grid_size(M)
    return np.arange(M) / M


def circle(N: int = 1, r: float = 1.0, center=(0.0, 0.0), M: int = 128) -> ClosedCurve:
    """``N``-fold circle of radius ``r``, counterclockwise."""
    if N < 1:
        raise InvalidInputError("N must be >= 1")
    if r <= 0:
        raise InvalidInputError("r must be positive")
    t = 2 * np.pi * N * _grid(M)
    return ClosedCurve(np.column_stack((center[0] + r * np.cos(t), center[1] + r * np.sin(t))))


def ellipse(a: float = 2.0, b: float = 1.0, M: int = 256) -> ClosedCurve:
    if a <= 0 or b <= 0:
        raise InvalidInputError("semi-axes must be positive")
    t = 2 * np.pi * _grid(M)
    return ClosedCurve(np.column_stack((a * np.cos(t), b * np.sin(t))))


def limacon(b: float = 0.5, M: int = 512) -> ClosedCurve:
    """Limacon ``r = b + cos(theta)`` with inner loop, resampled uniformly in arclength.

    Rotation number 2 and signed area ``pi (b^2 + 1/2)``.
    """
    if not 0 < b < 1:
        raise InvalidInputError("limacon needs 0 < b < 1 to have an inner loop")
    th = 2 * np.pi * _grid(M)
    r = b + np.cos(th)
    return reparametrize_arclength(ClosedCurve(np.column_stack((r * np.cos(th), r * np.sin(th)))))


def figure_eight(M: int = 256) -> ClosedCurve:
    """Gerono lemniscate ``(sin t, sin t cos t)``: rotation number 0 and zero area."""
    t = 2 * np.pi * _grid(M)
    return ClosedCurve(np.column_stack((np.sin(t), np.sin(t) * np.cos(t))))


def _tangent_angle_curve(ell: int, n: int, eps: float, M: int) -> tuple[np.ndarray, float]:
    x = _grid(M)
    e = np.exp(1j * (2 * np.pi * ell * x + eps * np.sin(2 * np.pi * n * x)))
    eh = np.fft.fft(e) / M
    closure = abs(eh[0])
    j = np.fft.fftfreq(M, 1.0 / M)
    zh = np.zeros_like(eh)
    nz = j != 0
    zh[nz] = eh[nz] / (2j * np.pi * j[nz])
    zh[M // 2] = 0.0
    z = np.fft.ifft(zh) * M
    return z - z.mean(), closure


def al_symmetric(sym, eps: float = 0.0, scale: float = 1.0, M: int = 256) -> ClosedCurve:
    """Curve of class ``A_{ell,n}`` with tangent angle ``2 pi ell x + eps sin(2 pi n x)``.

    Arclength-parametrized, length ``scale``, centered at the origin;
    ``K_osc = 2 pi^2 n^2 eps^2`` exactly.
    """
    sym = SymmetrySpec.coerce(sym)
    if eps < 0:
        raise InvalidInputError("eps must be >= 0")
    if scale <= 0:
        raise InvalidInputError("scale must be positive")
    z, closure = _tangent_angle_curve(sym.ell, sym.n, eps, M)
    if closure > 1e-8:
        raise ConstructionError(
            f"tangent-angle curve does not close (residual {closure:.2e}); "
            f"n={sym.n} divides ell={sym.ell}")
    z = scale * z
    return ClosedCurve(np.column_stack((z.real, z.imag)))


class ZeroAreaCurve(NamedTuple):
    curve: ClosedCurve
    eps_star: float


def is_locally_convex(curve: ClosedCurve) -> bool:
    return bool(frame(curve).k.min() > 0)


def zero_area_symmetric(sym, M: int = 512, eps_max: float = EPS_MAX) -> ZeroAreaCurve:
    """Zero-area member of ``A_{ell,n}`` found by root finding on ``eps``.

    The first sign change of the area on a scan of ``[0, eps_max]`` is refined by
    Brent's method until ``|A| < 1e-10``.
    """
    sym = SymmetrySpec.coerce(sym)
    if sym.ell < 2:
        raise InvalidInputError(
            "ell = 1 curves of this family are embedded when locally convex; zero area "
            "is not attainable")

    def area(eps: float) -> float:
        return summarize(al_symmetric(sym, eps, 1.0, M)).A

    grid = np.linspace(0.0, eps_max, 161)
    prev_e, prev_a = grid[0], area(grid[0])
    for e in grid[1:]:
        a = area(e)
        if np.sign(a) != np.sign(prev_a):
            break
        prev_e, prev_a = e, a
    else:
        raise BracketError(f"area does not change sign on [0, {eps_max}]")
    eps_star = brentq(area, prev_e, e, xtol=1e-15, maxiter=200)
    curve = al_symmetric(sym, eps_star, 1.0, M)
    if is_locally_convex(curve):
        log.info("zero-area curve in A_{%d,%d} is strictly locally convex (min k = %.4g)",
                 sym.ell, sym.n, frame(curve).k.min())
    return ZeroAreaCurve(curve, float(eps_star))


def perturbed_circle(N: int = 1, modes: Sequence = (), M: int = 256) -> ClosedCurve:
    """Radial graph ``(1 + sum a_j cos(2 pi f_j x + phase_j))`` over the ``N``-fold circle.

    ``modes`` holds ``(frequency, amplitude)`` or ``(frequency, amplitude, phase)``.
    """
    x = _grid(M)
    if N < 1:
        raise InvalidInputError("N must be >= 1")
    radius = np.ones(M)
    total = 0.0
    for mode in modes:
        f, a = int(mode[0]), float(mode[1])
        phase = float(mode[2]) if len(mode) > 2 else 0.0
        if f > M // 8:
            raise InvalidInputError(f"frequency {f} exceeds M/8 = {M // 8}")
        radius += a * np.cos(2 * np.pi * f * x + phase)
        total += abs(a)
    if total >= 0.5:
        raise InvalidInputError("sum of |amplitudes| must be < 0.5")
    t = 2 * np.pi * N * x
    return ClosedCurve(np.column_stack((radius * np.cos(t), radius * np.sin(t))))


def random_perturbed_circle(rng: np.random.Generator, N: int = 1, n_modes: int = 5,
                            max_freq: int = 8, amp_total: float = 0.3, M: int = 256) -> ClosedCurve:
    """Seeded random instance of :func:`perturbed_circle`."""
    freqs = rng.integers(1, max_freq + 1, size=n_modes)
    amps = rng.dirichlet(np.ones(n_modes)) * amp_total * rng.uniform(0.2, 1.0)
    phases = rng.uniform(0, 2 * np.pi, size=n_modes)
    return perturbed_circle(N, list(zip(freqs, amps, phases)), M)


GENERATORS = {
    "circle": circle,
    "ellipse": ellipse,
    "limacon": limacon,
    "figure_eight": figure_eight,
    "al_symmetric": al_symmetric,
    "zero_area_symmetric": lambda **kw: zero_area_symmetric(**kw).curve,
    "perturbed_circle": perturbed_circle,
}


def build(name: str, params: dict) -> ClosedCurve:
    """Construct a registered generator's curve from JSON-style parameters."""
    try:
        fn = GENERATORS[name]
    except KeyError:
        raise InvalidInputError(f"unknown generator {name!r}") from None
    kwargs = dict(params)
    if "sym" in kwargs:
        kwargs["sym"] = SymmetrySpec.coerce(kwargs["sym"])
    if "center" in kwargs:
        kwargs["center"] = tuple(kwargs["center"])
    return fn(**kwargs)
