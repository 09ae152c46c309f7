"""Command line entry point: ``curveflow run | sweep | check | presets``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..curve import CurveError
from ..diagnostics import check_inequalities, kosc_identity_verdict
from . import io
from .config import ConfigError, ExperimentConfig, SweepConfig, apply_overrides
from .experiment import EXIT_ABORT, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, run_experiment
from .presets import get_preset, preset_names
from .sweep import run_sweep


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def cmd_run(args) -> int:
    if bool(args.preset) == bool(args.config):
        raise ConfigError("give exactly one of --preset or --config")
    cfg = get_preset(args.preset) if args.preset else ExperimentConfig.from_json(_read(args.config))
    cfg = apply_overrides(cfg, args.set or [])
    out = run_experiment(cfg, args.out)
    print(f"{cfg.name}: {out.state.status.value} at t={out.state.t:.6g} after {out.state.steps} steps"
          + (f" ({out.state.reason})" if out.state.reason else ""))
    for v in out.verdicts:
        print(f"  {v.outcome.value:>14}  {v.check}" + (f"  {v.message}" if v.message else ""))
    print(f"outputs in {out.directory}")
    return out.exit_code


def cmd_sweep(args) -> int:
    cfg = SweepConfig.from_json(_read(args.config))
    if args.set:
        cfg.base = apply_overrides(cfg.base, args.set)
    cfg.validate()
    print(f"sweep {cfg.base.name}: {cfg.size} cells")
    path = run_sweep(cfg, args.out, write_cells=args.keep_cells)
    print(f"aggregate written to {path}")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        curve = io.read_snapshot(Path(args.curve))
    except OSError as exc:
        raise ConfigError(f"cannot read {args.curve}: {exc}") from None
    verdicts = check_inequalities(curve, range(args.m + 1))
    if not args.no_identity:
        verdicts.append(kosc_identity_verdict(curve, args.m))
    print(io.dumps([v.to_dict() for v in verdicts]), end="")
    return EXIT_FAIL if any(v.failed for v in verdicts) else EXIT_OK


def cmd_presets(args) -> int:
    for name in preset_names():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curveflow",
                                description="Area-preserving curvature flows of closed planar curves.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("--preset")
    r.add_argument("--config")
    r.add_argument("--out", help="output root (default: the config's output_dir)")
    r.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config field, dotted paths allowed (repeatable)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a cartesian parameter sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--set", action="append", metavar="KEY=VALUE")
    s.add_argument("--keep-cells", action="store_true", help="also write every cell's outputs")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check", help="inequality and identity checks on a curve snapshot")
    c.add_argument("--curve", required=True)
    c.add_argument("--m", type=int, default=0)
    c.add_argument("--no-identity", action="store_true")
    c.set_defaults(func=cmd_check)

    ls = sub.add_parser("presets", help="list built-in presets")
    ls.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, CurveError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
