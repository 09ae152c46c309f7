"""Flat-file outputs: trajectory CSV, JSON reports and curve snapshots."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from ..curve import (ClosedCurve, curve_from_json, curve_from_text, curve_to_json,
                     curve_to_text)
from ..trajectory import TrajectoryLog

CSV_HEADER = ["t", "L", "A", "N", "kbar", "K_osc", "D", "I", "dissipation", "ksq", "kdev_inf",
              "kmax", "centroid_x", "centroid_y", "symmetry_residual", "degraded"]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def trajectory_rows(log: TrajectoryLog) -> list[list[str]]:
    rows = []
    for r in log.records:
        rows.append([fmt(r.t), fmt(r.L), fmt(r.A), fmt(r.N), fmt(r.kbar), fmt(r.K_osc), fmt(r.D),
                     fmt(r.I), fmt(r.dissipation), fmt(r.ksq), fmt(r.kdev_inf), fmt(r.kmax),
                     fmt(r.centroid[0]), fmt(r.centroid[1]), fmt(r.symmetry_residual),
                     fmt(r.degraded)])
    return rows


def write_trajectory_csv(log: TrajectoryLog, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(trajectory_rows(log))


def read_trajectory_csv(path: Path) -> dict[str, np.ndarray]:
    """Columns of a trajectory CSV as float arrays (blank cells become NaN)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        cols[name] = np.array([float(r[j]) if r[j] else math.nan for r in body])
    return cols


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.floating,)):
        return _clean(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def dumps(data) -> str:
    return json.dumps(_clean(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(data, path: Path) -> None:
    Path(path).write_text(dumps(data))


def write_snapshot(curve: ClosedCurve, path: Path) -> None:
    path = Path(path)
    path.write_text(curve_to_text(curve) if path.suffix == ".txt" else curve_to_json(curve))


def read_snapshot(path: Path) -> ClosedCurve:
    path = Path(path)
    text = path.read_text()
    return curve_from_text(text) if path.suffix == ".txt" else curve_from_json(text)
