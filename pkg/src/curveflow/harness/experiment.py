"""Run one configured experiment and write its artifacts."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..curve import ClosedCurve, CurveError
from ..diagnostics import CHECKERS, Outcome, RunResult, Verdict
from ..flow import FlowState, Status, run
from ..generators import build
from ..trajectory import TrajectoryLog
from . import io
from .config import ConfigError, ExperimentConfig

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3


@dataclass
class ExperimentOutcome:
    config: ExperimentConfig
    directory: Optional[Path]
    log: TrajectoryLog
    state: FlowState
    initial: ClosedCurve
    verdicts: list

    @property
    def exit_code(self) -> int:
        if self.state.status is Status.ABORTED:
            return EXIT_ABORT
        return EXIT_FAIL if any(v.failed for v in self.verdicts) else EXIT_OK

    def report(self) -> dict:
        meta = dict(self.log.meta)
        return {
            "name": self.config.name,
            "status": self.state.status.value,
            "reason": self.state.reason,
            "t_final": self.state.t,
            "steps": self.state.steps,
            "meta": meta,
            "exit_code": self.exit_code,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def build_initial(config: ExperimentConfig) -> ClosedCurve:
    params = dict(config.generator_params)
    params.setdefault("M", config.M)
    try:
        return build(config.generator, params)
    except (TypeError, CurveError) as exc:
        raise ConfigError(f"generator {config.generator!r} rejected {params}: {exc}") from None


def evaluate(config: ExperimentConfig, result: RunResult) -> list[Verdict]:
    verdicts = []
    for name, options in config.check_specs():
        try:
            verdicts.append(CHECKERS[name](result, **options))
        except TypeError as exc:
            raise ConfigError(f"bad options for checker {name!r}: {exc}") from None
        except (CurveError, ValueError) as exc:
            verdicts.append(Verdict(name, Outcome.INCONCLUSIVE, message=f"checker error: {exc}"))
    return verdicts


def run_experiment(config: ExperimentConfig, out_root: Optional[Path] = None,
                   write: bool = True) -> ExperimentOutcome:
    """Validate, simulate, check and (optionally) write ``out_root/name/``.

    Configuration problems raise :class:`ConfigError` before any directory is
    created.
    """
    config.validate()
    initial = build_initial(config)
    traj, state = run(initial, config.flow_params(), config.log_every,
                      symmetry=config.symmetry_spec(), max_steps=config.max_steps)
    verdicts = evaluate(config, RunResult(traj, initial, state.curve, config.seed))
    outcome = ExperimentOutcome(config, None, traj, state, initial, verdicts)
    if write:
        root = Path(out_root if out_root is not None else config.output_dir)
        outcome.directory = write_outputs(outcome, root / config.name)
    return outcome


def write_outputs(outcome: ExperimentOutcome, directory: Path) -> Path:
    try:
        directory.mkdir(parents=True, exist_ok=True)
        io.write_trajectory_csv(outcome.log, directory / "trajectory.csv")
        io.write_json(outcome.report(), directory / "report.json")
        io.write_snapshot(outcome.initial, directory / "initial.json")
        io.write_snapshot(outcome.state.curve, directory / "final.json")
        (directory / "config.json").write_text(outcome.config.to_json())
    except OSError as exc:
        raise OSError(f"cannot write outputs under {directory}: {exc}") from exc
    return directory
