"""Verdicts on trajectories and curves: identities, inequalities, decay rates, blowup.

Every checker returns a :class:`Verdict` (or a list of them) that serializes to
plain JSON.  Rate checks are one-sided: the theory only bounds how slowly
things may decay or how slowly curvature may blow up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import tolerances as tol
from .curve import (ClosedCurve, CurveError, _arclength_derivative, curvature_deviation_derivative,
                    frame, hausdorff_distance, integrate, rotation_number, summarize)
from .flow import FlowParams, Status, initial_state, normal_velocity, step_imex, time_scale
from .trajectory import TrajectoryLog


class Outcome(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    NOT_APPLICABLE = "not_applicable"


class WindowError(ValueError):
    """Fit window holds nonpositive values or too few points."""


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    return v


@dataclass
class Verdict:
    check: str
    outcome: Outcome
    values: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    window: Optional[tuple] = None
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.outcome is Outcome.PASS

    @property
    def failed(self) -> bool:
        return self.outcome is Outcome.FAIL

    def to_dict(self) -> dict:
        return {
            "check_name": self.check,
            "outcome": self.outcome.value,
            "fitted": _json_value(self.values),
            "thresholds": _json_value(self.thresholds),
            "window": _json_value(self.window),
            "message": self.message,
        }


def _verdict(check: str, ok: bool, **kw) -> Verdict:
    return Verdict(check, Outcome.PASS if ok else Outcome.FAIL, **kw)


# ---------------------------------------------------------------------------
# rates


class RateFit(NamedTuple):
    rate: float
    intercept: float
    window: tuple
    residual: float


def reference_rate(L0: float, m: int) -> float:
    """Decay-rate unit ``c = (2 pi / L0)^(2m+2)``."""
    if L0 <= 0:
        raise ValueError("L0 must be positive")
    return (2 * np.pi / L0) ** (2 * m + 2)


def fit_exponential_rate(t, values, window: tuple = (0.5, 1.0), min_points: int = 10) -> RateFit:
    """Least-squares ``log value = intercept - rate * t`` on a sub-window.

    ``window`` is a pair of fractions of the time range spanned by the
    positive values.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    pos = v > 0
    if not pos.any():
        raise WindowError("no positive values")
    t0, t1 = t[pos].min(), t[pos].max()
    lo, hi = t0 + window[0] * (t1 - t0), t0 + window[1] * (t1 - t0)
    sel = (t >= lo) & (t <= hi)
    if np.any(v[sel] <= 0):
        raise WindowError("nonpositive values in fit window")
    if sel.sum() < min_points:
        raise WindowError(f"{int(sel.sum())} points in fit window, need {min_points}")
    ts, ys = t[sel], np.log(v[sel])
    slope, intercept = np.polyfit(ts, ys, 1)
    res = ys - (intercept + slope * ts)
    return RateFit(float(-slope), float(intercept), (float(ts[0]), float(ts[-1])),
                   float(np.sqrt(np.mean(res**2))))


# Below these levels K_osc and ||k - kbar||_inf are roundoff and carry no rate
# information; the two floors correspond to each other through K_osc ~ (L kdev)^2 / 2.
KOSC_FLOOR = 1e-18
KDEV_FLOOR = 1e-9        # on ||k - kbar||_inf * L


def _usable(t: np.ndarray, v: np.ndarray, floor: np.ndarray) -> np.ndarray:
    """Leading stretch of samples that stay above the roundoff floor."""
    below = np.nonzero(~(v > floor))[0]
    n = below[0] if below.size else v.size
    return np.arange(n)


def _converged_like(log: TrajectoryLog) -> bool:
    return log.status in (Status.CONVERGED.value, Status.REACHED_T_END.value)


def check_defect_decay(log: TrajectoryLog, m: Optional[int] = None) -> Verdict:
    """``0 <= D(t) <= D(0) exp(-2 N0 c t)`` pointwise, with small slack."""
    name = "defect_decay"
    m = log.m if m is None else m
    N0, A0, L0 = int(log.meta["N0"]), float(log.meta["A0"]), float(log.meta["L0"])
    if not _converged_like(log) or N0 < 1 or A0 <= 0:
        return Verdict(name, Outcome.NOT_APPLICABLE,
                       message=f"needs an immortal run with N0 >= 1 and A0 > 0 (status {log.status})")
    c = reference_rate(L0, m)
    t, D = log.t, log.column("D")
    bound = D[0] * np.exp(-2 * N0 * c * t) * (1 + 1e-3) + 1e-10 * L0**2
    lower_ok = bool(np.all(D >= -1e-8 * L0**2))
    upper_ok = bool(np.all(D <= bound))
    excess = float(np.max(D - bound))
    return _verdict(name, lower_ok and upper_ok,
                    values={"min_D": float(D.min()), "max_excess_over_bound": excess, "c": c},
                    thresholds={"lower": -1e-8 * L0**2, "rel_slack": 1e-3, "abs_slack": 1e-10 * L0**2},
                    window=(float(t[0]), float(t[-1])))


def check_kosc_decay(log: TrajectoryLog, m: Optional[int] = None, window: tuple = (0.5, 1.0),
                     slack: float = 0.1) -> tuple[Optional[RateFit], Verdict]:
    """Fitted decay rates of ``K_osc`` and ``||k - kbar||_inf`` against ``c/2`` and ``c/4``."""
    name = "kosc_decay"
    m = log.m if m is None else m
    if not _converged_like(log):
        return None, Verdict(name, Outcome.NOT_APPLICABLE, message=f"status {log.status}")
    L0 = float(log.meta["L0"])
    c = reference_rate(L0, m)
    t, K, kd, L = log.t, log.column("K_osc"), log.column("kdev_inf"), log.column("L")
    iK = _usable(t, K, np.full_like(K, KOSC_FLOOR))
    ik = _usable(t, kd, KDEV_FLOOR / L)
    try:
        fK = fit_exponential_rate(t[iK], K[iK], window)
        fk = fit_exponential_rate(t[ik], kd[ik], window)
    except WindowError as exc:
        return None, Verdict(name, Outcome.INCONCLUSIVE, message=str(exc))
    need_K, need_k = 0.5 * c * (1 - slack), 0.25 * c * (1 - slack)
    ok = fK.rate >= need_K and fk.rate >= need_k
    return fK, _verdict(name, ok,
                        values={"rate_K_osc": fK.rate, "rate_kdev_inf": fk.rate, "c": c,
                                "residual_K_osc": fK.residual, "residual_kdev_inf": fk.residual,
                                "window_kdev_inf": fk.window},
                        thresholds={"rate_K_osc": need_K, "rate_kdev_inf": need_k},
                        window=fK.window)


class BlowupFit(NamedTuple):
    exponent: float
    T_star: float
    intercept: float
    window: tuple
    residual: float


def _power_fit(t, y, T):
    x = np.log(T - t)
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (icpt + slope * x)
    return -slope, icpt, float(np.sqrt(np.mean(res**2)))


def fit_blowup_exponent(t, ksq, min_points: int = 10) -> BlowupFit:
    """Fit ``ksq ~ (T* - t)^(-p)`` over the final decade of growth.

    ``T*`` is chosen by a profile search that maximizes log-log linearity.
    """
    t = np.asarray(t, dtype=float)
    q = np.asarray(ksq, dtype=float)
    below = np.nonzero(q < q[-1] / 10)[0]
    start = below[-1] + 1 if below.size else 0
    ts, ys = t[start:], np.log(q[start:])
    if ts.size < min_points:
        raise WindowError(f"{ts.size} points in the final decade of growth, need {min_points}")
    span = ts[-1] - ts[0]
    if span <= 0:
        raise WindowError("degenerate time window")

    def rms(log_delta):
        return _power_fit(ts, ys, ts[-1] + span * 10.0**log_delta)[2]

    # T* - t_last must stay resolvable next to t_last itself
    lo_exp = max(-10.0, math.log10(64 * np.finfo(float).eps * max(abs(ts[-1]), span) / span))
    grid = np.linspace(lo_exp, 3, 261)
    vals = [rms(g) for g in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best = minimize_scalar(rms, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    g = best.x if best.fun <= vals[i] else grid[i]
    T = ts[-1] + span * 10.0**g
    p, icpt, res = _power_fit(ts, ys, T)
    return BlowupFit(float(p), float(T), float(icpt), (float(ts[0]), float(ts[-1])), res)


def check_blowup_exponent(log: TrajectoryLog, m: Optional[int] = None,
                          slack: float = 0.5) -> tuple[Optional[BlowupFit], Verdict]:
    """One-sided check ``p >= (1 - slack) / (2m + 2)`` on a blown-up run."""
    name = "blowup_exponent"
    m = log.m if m is None else m
    if log.status != Status.BLOWN_UP.value:
        return None, Verdict(name, Outcome.NOT_APPLICABLE, message=f"status {log.status}")
    need = (1 - slack) / (2 * m + 2)
    try:
        fit = fit_blowup_exponent(log.t, log.column("ksq"))
    except WindowError as exc:
        return None, Verdict(name, Outcome.INCONCLUSIVE, message=str(exc),
                             thresholds={"exponent": need})
    return fit, _verdict(name, fit.exponent >= need,
                         values={"exponent": fit.exponent, "T_star": fit.T_star,
                                 "residual": fit.residual},
                         thresholds={"exponent": need}, window=fit.window)


# ---------------------------------------------------------------------------
# curve-level checks


class KoscIdentity(NamedTuple):
    lhs: float
    rhs: float
    gap: float
    h: float


def kosc_identity_rhs(curve: ClosedCurve, m: int, N: Optional[int] = None) -> float:
    """``-2 int k_{s^{m+1}}^2 + int Q_{s^m} (k-kbar)_{s^m} + 2 kbar^2 int (k-kbar)_{s^m}^2``
    with ``Q = (k-kbar)^3 + 3 kbar (k-kbar)^2``."""
    fr = frame(curve)
    L = float(np.mean(fr.speed))
    N = rotation_number(curve, fr) if N is None else N
    kbar = 2 * np.pi * N / L
    u = fr.k - kbar
    Q = u**3 + 3 * kbar * u**2
    um = curvature_deviation_derivative(fr, kbar, m)
    Qm = _arclength_derivative(Q, fr.speed, m)
    k1 = _arclength_derivative(fr.k, fr.speed, m + 1)
    return (-2 * integrate(fr.speed, k1**2) + integrate(fr.speed, Qm * um)
            + 2 * kbar**2 * integrate(fr.speed, um**2))


def _osc_energy(curve: ClosedCurve, N: int) -> float:
    fr = frame(curve)
    kbar = 2 * np.pi * N / float(np.mean(fr.speed))
    return integrate(fr.speed, (fr.k - kbar) ** 2)


def _flow_through(curve: ClosedCurve, m: int, times: Sequence[float], imex_tol: float) -> list:
    """Curves at the increasing ``times``, each landed on exactly."""
    params = FlowParams(m=m, t_end=times[-1], dt_max=times[-1], imex_tol=imex_tol)
    state = initial_state(curve, params)
    out = []
    for target in times:
        while state.t < target:
            state = step_imex(state, params, until=target)
            if state.status is not Status.RUNNING:
                raise CurveError(f"micro-step flow stopped: {state.reason}")
        out.append(state.curve)
    return out


def _gap(lhs: float, rhs: float, floor: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale < floor else float(abs(lhs - rhs) / scale)


def check_kosc_identity(curve: ClosedCurve, m: int, fd_tol: float = 1e-4,
                        imex_tol: float = 1e-11, halvings: int = 8) -> KoscIdentity:
    """Finite difference in time of ``int (k - kbar)^2 ds`` against its evolution formula.

    The curve is flowed to a middle time ``H``; central differences of half
    width ``delta = H, H/2, ...`` around it are halved until two successive
    quotients agree to ``fd_tol``, and the last one is compared with the
    formula evaluated on the middle curve.
    """
    s = summarize(curve)
    N = s.N
    H = 1e-3 * time_scale(s.L, N, m)
    floor = 1e-9 * (2 * np.pi / s.L) ** (2 * m + 3)
    deltas = H / 2.0 ** np.arange(halvings)
    times = np.concatenate((H - deltas[1:], [H], H + deltas[::-1]))
    curves = [curve] + _flow_through(curve, m, times, imex_tol)
    E = [_osc_energy(c, N) for c in curves]
    n = halvings
    # curves[i] sits at H - deltas[i] and curves[2n - i] at H + deltas[i]
    quot = [(E[2 * n - i] - E[i]) / (2 * d) for i, d in enumerate(deltas)]
    lhs, used = quot[-1], deltas[-1]
    for i in range(1, n):
        if abs(quot[i] - quot[i - 1]) <= fd_tol * max(abs(quot[i]), floor):
            lhs, used = quot[i], deltas[i]
            break
    rhs = kosc_identity_rhs(curves[n], m, N)
    return KoscIdentity(float(lhs), float(rhs), _gap(lhs, rhs, floor), float(used))


def kosc_identity_verdict(curve: ClosedCurve, m: int, rel: float = 1e-2) -> Verdict:
    r = check_kosc_identity(curve, m)
    return _verdict("kosc_identity", r.gap < rel,
                    values={"lhs": r.lhs, "rhs": r.rhs, "gap": r.gap, "h": r.h},
                    thresholds={"gap": rel})


def check_inequalities(curve: ClosedCurve, m_range: Iterable[int] = (0, 1, 2)) -> list[Verdict]:
    """Poincare-Wirtinger (L2 and Linf), the defect estimate and Fenchel's bound."""
    fr = frame(curve)
    L = float(np.mean(fr.speed))
    N = rotation_number(curve, fr)
    kbar = 2 * np.pi * N / L
    out = []
    for m in m_range:
        u = curvature_deviation_derivative(fr, kbar, m)
        u1 = curvature_deviation_derivative(fr, kbar, m + 1)
        l2, l2_next = integrate(fr.speed, u**2), integrate(fr.speed, u1**2)
        rhs = L**2 / (4 * np.pi**2) * l2_next
        out.append(_verdict(f"poincare_wirtinger_m{m}", tol.holds(l2, rhs),
                            values={"lhs": l2, "rhs": rhs}))
        sup = float(np.max(np.abs(u))) ** 2
        rhs_inf = L / (2 * np.pi) * l2_next
        out.append(_verdict(f"poincare_wirtinger_inf_m{m}", tol.holds(sup, rhs_inf),
                            values={"lhs": sup, "rhs": rhs_inf}))
    if N >= 1:
        A = float(-0.5 * integrate(fr.speed, np.einsum("ij,ij->i", curve.samples, fr.normal)))
        D = L**2 - 4 * np.pi * N * A
        K_osc = L * integrate(fr.speed, (fr.k - kbar) ** 2)
        lhs = 4 * np.pi**2 * N / L**2 * abs(D)
        out.append(_verdict("defect_estimate", tol.holds(lhs, K_osc),
                            values={"lhs": lhs, "rhs": K_osc, "D": D}))
    total = integrate(fr.speed, np.abs(fr.k))
    out.append(_verdict("fenchel", tol.holds(2 * np.pi, total),
                        values={"lhs": 2 * np.pi, "rhs": total}))
    return out


def check_centroid_convergence(log: TrajectoryLog, m: Optional[int] = None,
                               slack: float = 0.1, motion_floor: float = 1e-12) -> Verdict:
    """Exponential settling of the centroid at rate ``(1 - slack) c / 4``.

    With ``P_inf`` the final centroid, ``|centroid(t) - P_inf| <= B e^{-r t}``
    follows from ``|centroid'(t)| <= r B e^{-r t}``.  The constant is fitted
    as the smallest one dominating the centroid speed on the first half of the
    window (the last half of the run) and must keep dominating on the rest.
    """
    name = "centroid_convergence"
    m = log.m if m is None else m
    if not _converged_like(log):
        return Verdict(name, Outcome.NOT_APPLICABLE, message=f"status {log.status}")
    L0 = float(log.meta["L0"])
    r = 0.25 * reference_rate(L0, m) * (1 - slack)
    t = log.t
    P = np.column_stack((log.column("centroid_x"), log.column("centroid_y")))
    dist = np.linalg.norm(P - P[-1], axis=1)
    if dist.max() < motion_floor * L0:
        return Verdict(name, Outcome.INCONCLUSIVE, values={"max_motion": float(dist.max())},
                       message="centroid pinned (motion below roundoff)")
    sel = np.nonzero(t >= 0.5 * t[-1])[0]
    if sel.size < 5:
        return Verdict(name, Outcome.INCONCLUSIVE, message="too few log points in window")
    i0 = sel[0] - 1 if sel[0] > 0 else sel[0]
    idx = np.arange(i0, t.size)
    dt = np.diff(t[idx])
    keep = dt > 0
    step = np.linalg.norm(np.diff(P[idx], axis=0), axis=1)[keep]
    tm = t[idx][1:][keep]
    speed = step / dt[keep]
    half = tm.size // 2
    B = float(np.max(speed[:half] * np.exp(r * tm[:half])))
    bound = B * np.exp(-r * tm) * (1 + 1e-3) + motion_floor * L0 / dt[keep]
    ok = bool(np.all(speed[half:] <= bound[half:]))
    return _verdict(name, ok,
                    values={"B": B, "rate": r, "max_ratio": float(np.max(speed[half:] / bound[half:])),
                            "P_inf": [float(P[-1, 0]), float(P[-1, 1])]},
                    thresholds={"rate": r}, window=(float(tm[0]), float(tm[-1])))


# ---------------------------------------------------------------------------
# run-level invariants


def check_area_conservation(log: TrajectoryLog, rel: float = 1e-5) -> Verdict:
    A0, L0 = float(log.meta["A0"]), float(log.meta["L0"])
    scale = max(abs(A0), L0**2 / (4 * np.pi))
    drift = float(np.max(np.abs(log.column("A") - A0)))
    return _verdict("area_conservation", drift <= rel * scale,
                    values={"max_drift": drift, "relative": drift / scale},
                    thresholds={"relative": rel})


def check_length_monotonicity(log: TrajectoryLog, slack: float = 1e-10) -> Verdict:
    L = log.column("L")
    L0 = float(log.meta["L0"])
    rise = float(np.max(np.diff(L))) if L.size > 1 else 0.0
    return _verdict("length_monotonicity", rise <= slack * L0,
                    values={"max_increase": rise}, thresholds={"max_increase": slack * L0})


def check_rotation_conservation(log: TrajectoryLog) -> Verdict:
    N = log.column("N")
    N0 = int(log.meta["N0"])
    return _verdict("rotation_conservation", bool(np.all(N == N0)),
                    values={"N0": N0, "distinct": sorted({int(n) for n in N})})


def check_symmetry_preservation(log: TrajectoryLog, initial_tol: float = 1e-10,
                                rel: float = 1e-6) -> Verdict:
    name = "symmetry_preservation"
    res = log.column("symmetry_residual")
    if res.size == 0 or not np.isfinite(res[0]):
        return Verdict(name, Outcome.NOT_APPLICABLE, message="no symmetry configured")
    if res[0] >= initial_tol:
        return Verdict(name, Outcome.NOT_APPLICABLE, values={"initial_residual": float(res[0])},
                       message="initial curve is not symmetric to tolerance")
    ratio = res / log.column("L")
    return _verdict(name, bool(np.all(ratio < rel)),
                    values={"max_relative_residual": float(np.max(ratio))},
                    thresholds={"relative": rel})


def dissipation_gaps(log: TrajectoryLog, roundoff: float = 1e-11) -> tuple[np.ndarray, np.ndarray]:
    """Relative gaps between ``dL/dt`` (three-point difference) and ``-dissipation``.

    Returns ``(gaps, mask)`` over interior log points; ``mask`` drops triples
    whose length change is below ``roundoff * L0`` (difference dominated by
    rounding) or whose times coincide.
    """
    t, L, q = log.t, log.column("L"), log.column("dissipation")
    L0 = float(log.meta["L0"])
    h0, h1 = t[1:-1] - t[:-2], t[2:] - t[1:-1]
    mask = (h0 > 0) & (h1 > 0) & (np.abs(L[2:] - L[:-2]) >= roundoff * L0)
    with np.errstate(all="ignore"):
        dL = (-h1 / (h0 * (h0 + h1)) * L[:-2] + (h1 - h0) / (h0 * h1) * L[1:-1]
              + h0 / (h1 * (h0 + h1)) * L[2:])
        gaps = np.abs(dL + q[1:-1]) / np.abs(q[1:-1])
    return gaps, mask


def check_dissipation_identity(log: TrajectoryLog, rel: float = 1e-2,
                               fraction: float = 0.95, min_points: int = 10) -> Verdict:
    name = "dissipation_identity"
    if len(log) < 3:
        return Verdict(name, Outcome.INCONCLUSIVE, message="fewer than three log points")
    gaps, mask = dissipation_gaps(log)
    n = int(mask.sum())
    if n < min_points:
        return Verdict(name, Outcome.INCONCLUSIVE, values={"usable": n},
                       message="too few log triples with resolvable length change")
    frac = float(np.mean(gaps[mask] < rel))
    return _verdict(name, frac >= fraction,
                    values={"fraction_within": frac, "usable": n, "excluded": int((~mask).sum()),
                            "median_gap": float(np.median(gaps[mask]))},
                    thresholds={"relative": rel, "fraction": fraction})


def check_immortal_isoperimetry(log: TrajectoryLog, rel: float = 1e-6,
                                ratio_tol: float = 1e-4) -> Verdict:
    """On converged runs, ``L^2 >= 4 pi N0 A0`` throughout and ``I -> N0``."""
    name = "immortal_isoperimetry"
    if log.status != Status.CONVERGED.value:
        return Verdict(name, Outcome.NOT_APPLICABLE, message=f"status {log.status}")
    N0, A0, L0 = int(log.meta["N0"]), float(log.meta["A0"]), float(log.meta["L0"])
    margin = float(np.min(log.column("L") ** 2 - 4 * np.pi * N0 * A0))
    I_final = log.records[-1].I
    ok = margin >= -rel * L0**2 and I_final is not None and abs(I_final - N0) < ratio_tol
    return _verdict(name, ok,
                    values={"min_margin": margin, "final_I": I_final, "N0": N0},
                    thresholds={"margin": -rel * L0**2, "I_tol": ratio_tol})


def check_expected_status(log: TrajectoryLog, expected: Sequence[str] = ("converged",)) -> Verdict:
    expected = [expected] if isinstance(expected, str) else list(expected)
    return _verdict("expected_status", log.status in expected,
                    values={"status": log.status, "t_final": log.meta.get("t_final"),
                            "reason": log.meta.get("reason", "")},
                    thresholds={"expected": expected})


def check_blowup_consistency(log: TrajectoryLog) -> Verdict:
    """Data with ``N0 = 0``, ``A0 <= 0`` or ``D0 < 0`` must never converge."""
    name = "blowup_consistency"
    N0, A0, L0 = int(log.meta["N0"]), float(log.meta["A0"]), float(log.meta["L0"])
    D0 = log.records[0].D
    # areas within 1e-10 L0^2 of zero count as zero (root-found initial data)
    if not (N0 == 0 or A0 <= 1e-10 * L0**2 or D0 < 0):
        return Verdict(name, Outcome.NOT_APPLICABLE, message="initial data admit convergence")
    return _verdict(name, log.status != Status.CONVERGED.value,
                    values={"N0": N0, "A0": A0, "D0": D0, "status": log.status})


def check_stationarity(initial: ClosedCurve, final: ClosedCurve, m: int,
                       speed_tol: float = 1e-9, drift_tol: float = 1e-6) -> Verdict:
    """``||V||_inf r^(2m+1)`` and the Hausdorff drift of a multiply covered circle."""
    s = summarize(initial)
    r = s.L / (2 * np.pi * max(s.N, 1))
    speed = float(np.max(np.abs(normal_velocity(initial, m, s.N)))) * r ** (2 * m + 1)
    drift = hausdorff_distance(initial, final) / r
    return _verdict("stationarity", speed < speed_tol and drift < drift_tol,
                    values={"scaled_speed": speed, "relative_drift": drift},
                    thresholds={"scaled_speed": speed_tol, "relative_drift": drift_tol})


# ---------------------------------------------------------------------------
# registry used by the harness


@dataclass(frozen=True)
class RunResult:
    log: TrajectoryLog
    initial: ClosedCurve
    final: ClosedCurve
    seed: int = 0


def reference_curves() -> dict[str, ClosedCurve]:
    """One instance of every generator, as used by the property suites."""
    from . import generators as g
    return {
        "circle": g.circle(1, 1.0, M=128),
        "double_circle": g.circle(2, 0.5, (1.0, 1.0), M=256),
        "ellipse": g.ellipse(2.0, 1.0, 256),
        "limacon": g.limacon(0.5, 1024),
        "figure_eight": g.figure_eight(256),
        "al_symmetric_2_3": g.al_symmetric((2, 3), 0.05, 4 * np.pi, 256),
        "al_symmetric_1_2": g.al_symmetric((1, 2), 0.3, 2.0, 256),
        "zero_area_trefoil": g.zero_area_symmetric((2, 3), 256).curve,
        "perturbed_circle": g.perturbed_circle(1, [(2, 0.1), (3, 0.07)], 256),
    }


def inequality_suite(seed: int = 0, n_random: int = 100, m_range=(0, 1, 2)) -> Verdict:
    """Every inequality on seeded random perturbed circles and on the reference curves."""
    from .generators import random_perturbed_circle
    rng = np.random.default_rng(seed)
    results = []
    for i in range(n_random):
        c = random_perturbed_circle(rng, N=int(rng.integers(1, 4)))
        results += [Verdict(f"random{i}:{v.check}", v.outcome) for v in check_inequalities(c, m_range)]
    for name, c in reference_curves().items():
        results += [Verdict(f"{name}:{v.check}", v.outcome) for v in check_inequalities(c, m_range)]
    return _aggregate("inequality_suite", results)


def kosc_identity_suite(rel: float = 1e-2) -> Verdict:
    from . import generators as g
    cases = [("circle", g.circle(1, 1.0, M=128), 0), ("ellipse", g.ellipse(2.0, 1.0, 256), 0),
             ("al_symmetric_1_3", g.al_symmetric((1, 3), 0.1, 1.0, 256), 1)]
    results = []
    for name, c, m in cases:
        v = kosc_identity_verdict(c, m, rel)
        results.append(Verdict(f"{name}:m{m}", v.outcome, v.values))
    return _aggregate("kosc_identity_suite", results)


def _aggregate(name: str, verdicts: list[Verdict]) -> Verdict:
    failed = [v.check for v in verdicts if v.failed]
    return Verdict(name, Outcome.FAIL if failed else Outcome.PASS,
                   values={"checked": len(verdicts), "failed": failed,
                           "results": {v.check: v.outcome.value for v in verdicts}})


def _inequalities_run(r: RunResult, m_range=(0, 1, 2)) -> Verdict:
    vs = [Verdict(f"initial:{v.check}", v.outcome, v.values) for v in check_inequalities(r.initial, m_range)]
    vs += [Verdict(f"final:{v.check}", v.outcome, v.values) for v in check_inequalities(r.final, m_range)]
    return _aggregate("inequalities", vs)


def _kosc_identity_run(r: RunResult, rel: float = 1e-2) -> Verdict:
    return kosc_identity_verdict(r.initial, r.log.m, rel)


CHECKERS: dict[str, Callable[..., Verdict]] = {
    "area_conservation": lambda r, **kw: check_area_conservation(r.log, **kw),
    "length_monotonicity": lambda r, **kw: check_length_monotonicity(r.log, **kw),
    "rotation_conservation": lambda r, **kw: check_rotation_conservation(r.log),
    "symmetry_preservation": lambda r, **kw: check_symmetry_preservation(r.log, **kw),
    "dissipation_identity": lambda r, **kw: check_dissipation_identity(r.log, **kw),
    "defect_decay": lambda r, **kw: check_defect_decay(r.log, **kw),
    "kosc_decay": lambda r, **kw: check_kosc_decay(r.log, **kw)[1],
    "centroid_convergence": lambda r, **kw: check_centroid_convergence(r.log, **kw),
    "blowup_exponent": lambda r, **kw: check_blowup_exponent(r.log, **kw)[1],
    "immortal_isoperimetry": lambda r, **kw: check_immortal_isoperimetry(r.log, **kw),
    "expected_status": lambda r, **kw: check_expected_status(r.log, **kw),
    "blowup_consistency": lambda r, **kw: check_blowup_consistency(r.log),
    "stationarity": lambda r, **kw: check_stationarity(r.initial, r.final, r.log.m, **kw),
    "inequalities": lambda r, **kw: _inequalities_run(r, **kw),
    "kosc_identity": lambda r, **kw: _kosc_identity_run(r, **kw),
    "inequality_suite": lambda r, **kw: inequality_suite(kw.pop("seed", r.seed), **kw),
    "kosc_identity_suite": lambda r, **kw: kosc_identity_suite(**kw),
}


def register_checker(name: str, fn: Callable[..., Verdict]) -> None:
    CHECKERS[name] = fn
