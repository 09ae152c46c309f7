"""Per-instant diagnostics records and the trajectory log built from them."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from .curve import (ClosedCurve, UnderResolvedCurveError, curvature_deviation_derivative, frame,
                    integrate, is_degraded, rotation_number, signed_area, turning_number)
from .generators import SymmetrySpec, symmetry_residual


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    L: float
    A: float
    N: int
    kbar: float
    K_osc: float
    D: float
    I: Optional[float]
    dissipation: float
    ksq: float
    kdev_inf: float
    kmax: float
    centroid: tuple
    symmetry_residual: Optional[float]
    degraded: bool


def make_record(curve: ClosedCurve, t: float, m: int,
                sym: Optional[SymmetrySpec] = None) -> DiagnosticsRecord:
    fr = frame(curve)
    L = float(np.mean(fr.speed))
    A = signed_area(curve, fr)
    degraded = is_degraded(curve)
    try:
        N = rotation_number(curve, fr)
    except UnderResolvedCurveError:
        N = turning_number(curve)
        degraded = True
    kbar = 2 * np.pi * N / L
    dev = fr.k - kbar
    c = np.mean(curve.samples * fr.speed[:, None], axis=0) / L
    return DiagnosticsRecord(
        t=float(t),
        L=L,
        A=A,
        N=N,
        kbar=kbar,
        K_osc=L * integrate(fr.speed, dev**2),
        D=L**2 - 4 * np.pi * N * A,
        I=L**2 / (4 * np.pi * A) if A > 0 else None,
        dissipation=integrate(fr.speed, curvature_deviation_derivative(fr, kbar, m) ** 2),
        ksq=integrate(fr.speed, fr.k**2),
        kdev_inf=float(np.max(np.abs(dev))),
        kmax=float(np.max(np.abs(fr.k))),
        centroid=(float(c[0]), float(c[1])),
        symmetry_residual=None if sym is None else symmetry_residual(curve, sym),
        degraded=bool(degraded),
    )


RECORD_FIELDS = [f.name for f in fields(DiagnosticsRecord)]


@dataclass
class TrajectoryLog:
    """Time series of :class:`DiagnosticsRecord` plus run metadata.

    ``meta`` holds at least ``m``, ``N0``, ``A0``, ``L0``; :func:`curveflow.flow.run`
    adds the terminal ``status``, ``reason``, ``steps`` and, on convergence, ``limit``.
    """

    records: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, rec: DiagnosticsRecord) -> None:
        self.records.append(rec)

    def column(self, name: str) -> np.ndarray:
        if name in ("centroid_x", "centroid_y"):
            i = 0 if name.endswith("x") else 1
            return np.array([r.centroid[i] for r in self.records])
        vals = [getattr(r, name) for r in self.records]
        return np.array([np.nan if v is None else v for v in vals], dtype=float)

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    @property
    def m(self) -> int:
        return int(self.meta["m"])

    @property
    def status(self) -> str:
        return str(self.meta.get("status", ""))

    def as_dicts(self) -> list:
        return [asdict(r) for r in self.records]

    @classmethod
    def from_columns(cls, meta: dict, **cols) -> "TrajectoryLog":
        """Build a synthetic log (used to validate checkers); missing columns default sensibly."""
        t = np.asarray(cols["t"], dtype=float)
        n = len(t)

        def col(name, default):
            v = cols.get(name)
            return np.full(n, default, dtype=float) if v is None else np.asarray(v, dtype=float)

        L = col("L", meta.get("L0", 1.0))
        A = col("A", meta.get("A0", 0.0))
        N = int(meta.get("N0", 1))
        D = cols.get("D")
        D = L**2 - 4 * np.pi * N * A if D is None else np.asarray(D, dtype=float)
        cx = col("centroid_x", 0.0)
        cy = col("centroid_y", 0.0)
        recs = []
        for i in range(n):
            recs.append(DiagnosticsRecord(
                t=float(t[i]), L=float(L[i]), A=float(A[i]), N=N,
                kbar=2 * np.pi * N / float(L[i]),
                K_osc=float(col("K_osc", 0.0)[i]), D=float(D[i]),
                I=float(L[i] ** 2 / (4 * np.pi * A[i])) if A[i] > 0 else None,
                dissipation=float(col("dissipation", 0.0)[i]),
                ksq=float(col("ksq", 0.0)[i]),
                kdev_inf=float(col("kdev_inf", 0.0)[i]),
                kmax=float(col("kmax", 0.0)[i]),
                centroid=(float(cx[i]), float(cy[i])),
                symmetry_residual=None, degraded=False))
        return cls(recs, dict(meta))
