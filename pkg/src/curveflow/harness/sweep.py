"""Cartesian parameter sweeps over a base experiment, run as independent processes."""

from __future__ import annotations

import csv
import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from ..diagnostics import check_blowup_exponent, check_kosc_decay
from . import io
from .config import ConfigError, ExperimentConfig, SweepConfig, set_path
from .experiment import run_experiment

log = logging.getLogger(__name__)

RESULT_COLUMNS = ["status", "t_final", "L_final", "I_final", "D0", "rate_K_osc",
                  "rate_kdev_inf", "blowup_exponent", "exit_code", "reason"]


def _sort_key(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (0, float(value), "")
    return (1, 0.0, repr(value))


def cells(config: SweepConfig) -> list[tuple]:
    """Axis-value tuples in lexicographic order."""
    values = [sorted(v, key=_sort_key) for _, v in config.axes]
    return list(itertools.product(*values))


def _cell_name(base: str, paths: list[str], values: tuple) -> str:
    parts = [f"{p.split('.')[-1]}={v}" for p, v in zip(paths, values)]
    return "__".join([base] + parts).replace("/", "_").replace(" ", "")


def _run_cell(base: dict, paths: list[str], values: tuple, out_dir: Optional[str]) -> dict:
    data = dict(base)
    for p, v in zip(paths, values):
        data = set_path(data, p, v)
    data["name"] = _cell_name(base["name"], paths, values)
    row = dict(zip(RESULT_COLUMNS, ["aborted", None, None, None, None, None, None, None, 3, ""]))
    try:
        cfg = ExperimentConfig.from_dict(data)
        out = run_experiment(cfg, out_dir, write=out_dir is not None)
    except Exception as exc:                       # a failed cell never stops the sweep
        row["reason"] = f"{type(exc).__name__}: {exc}"
        return row
    traj = out.log
    last = traj.records[-1]
    kfit, kv = check_kosc_decay(traj)
    bfit, _ = check_blowup_exponent(traj)
    kd = kv.values.get("rate_kdev_inf")
    row.update(status=out.state.status.value, t_final=out.state.t, L_final=last.L, I_final=last.I,
               D0=traj.records[0].D, rate_K_osc=None if kfit is None else kfit.rate,
               rate_kdev_inf=kd, blowup_exponent=None if bfit is None else bfit.exponent,
               exit_code=out.exit_code, reason=out.state.reason)
    return row


def worker_count(config: SweepConfig) -> int:
    cap = os.environ.get("CURVEFLOW_THREADS")
    n = config.max_parallel
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"CURVEFLOW_THREADS={cap!r} is not an integer") from None
    return max(1, min(n, config.size))


def status_flips(paths: list[str], rows: list[tuple]) -> list[dict]:
    """Consecutive values along each axis (others fixed) where the status changes."""
    flips = []
    for ax, path in enumerate(paths):
        groups: dict = {}
        for values, row in rows:
            rest = tuple(v for i, v in enumerate(values) if i != ax)
            groups.setdefault(rest, []).append((values[ax], row["status"]))
        for rest, seq in groups.items():
            for (v0, s0), (v1, s1) in zip(seq, seq[1:]):
                if s0 != s1:
                    flips.append({"axis": path, "fixed": list(rest), "between": [v0, v1],
                                  "statuses": [s0, s1]})
    return flips


def run_sweep(config: SweepConfig, out_root: Optional[Path] = None,
              write_cells: bool = False) -> Path:
    """Run every cell and write ``aggregate.csv`` and ``summary.json``.

    Rows follow lexicographic axis order regardless of completion order.
    """
    config.validate()
    paths = [p for p, _ in config.axes]
    grid = cells(config)
    known = set(config.base.to_dict())
    for p in paths:
        if p.split(".")[0] not in known:
            raise ConfigError(f"sweep axis {p!r} does not name a config field")
    root = Path(out_root if out_root is not None else config.base.output_dir) / config.base.name
    log.info("sweep %s: %d cells", config.base.name, len(grid))
    cell_dir = str(root / "cells") if write_cells else None
    base = config.base.to_dict()
    n = worker_count(config)
    if n == 1:
        results = [_run_cell(base, paths, v, cell_dir) for v in grid]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            futures = [pool.submit(_run_cell, base, paths, v, cell_dir) for v in grid]
            results = []
            for v, f in zip(grid, futures):
                try:
                    results.append(f.result())
                except Exception as exc:
                    results.append({**dict.fromkeys(RESULT_COLUMNS), "status": "aborted",
                                    "exit_code": 3, "reason": f"{type(exc).__name__}: {exc}"})
    root.mkdir(parents=True, exist_ok=True)
    path = root / "aggregate.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(paths + RESULT_COLUMNS)
        for values, row in zip(grid, results):
            w.writerow([io.fmt(v) if isinstance(v, float) else v for v in values]
                       + [row[c] if isinstance(row[c], str) else io.fmt(row[c]) for c in RESULT_COLUMNS])
    io.write_json({"cells": len(grid), "axes": [[p, list(v)] for p, v in config.axes],
                   "status_flips": status_flips(paths, list(zip(grid, results)))},
                  root / "summary.json")
    return path
