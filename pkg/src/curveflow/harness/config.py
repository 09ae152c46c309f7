"""Experiment and sweep configuration: one JSON document each, with validation."""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Optional

from ..curve import check_grid_size, CurveError
from ..diagnostics import CHECKERS
from ..flow import FlowParams
from ..generators import GENERATORS, SymmetrySpec


class ConfigError(ValueError):
    pass


_FLOW_FIELDS = {f.name for f in fields(FlowParams)}


@dataclass
class ExperimentConfig:
    name: str
    generator: str
    generator_params: dict = field(default_factory=dict)
    flow: dict = field(default_factory=dict)
    M: int = 256
    log_every: float = 0.01
    checks: list = field(default_factory=list)     # names or {"name": ..., "options": {...}}
    output_dir: str = "runs"
    seed: int = 0
    symmetry: Optional[list] = None                # [ell, n]
    max_steps: Optional[int] = None

    def check_specs(self) -> list[tuple[str, dict]]:
        out = []
        for c in self.checks:
            if isinstance(c, str):
                out.append((c, {}))
            else:
                out.append((c["name"], dict(c.get("options", {}))))
        return out

    def flow_params(self) -> FlowParams:
        return FlowParams(**self.flow)

    def symmetry_spec(self) -> Optional[SymmetrySpec]:
        return None if self.symmetry is None else SymmetrySpec.coerce(self.symmetry)

    def validate(self) -> "ExperimentConfig":
        if not self.name or "/" in self.name:
            raise ConfigError(f"invalid experiment name {self.name!r}")
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}; known: {sorted(GENERATORS)}")
        try:
            check_grid_size(self.M)
        except CurveError as exc:
            raise ConfigError(str(exc)) from None
        if not self.log_every > 0:
            raise ConfigError("log_every must be positive")
        unknown = set(self.flow) - _FLOW_FIELDS
        if unknown:
            raise ConfigError(f"unknown flow parameters {sorted(unknown)}")
        try:
            self.flow_params()
            self.symmetry_spec()
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid flow or symmetry settings: {exc}") from None
        for name, _ in self.check_specs():
            if name not in CHECKERS:
                raise ConfigError(f"unknown checker {name!r}; known: {sorted(CHECKERS)}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError("max_steps must be positive")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            return cls(**copy.deepcopy(data))
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


def parse_value(text: str) -> Any:
    """JSON literal if it parses, else the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_path(data: dict, path: str, value: Any) -> dict:
    """Copy of ``data`` with the dotted ``path`` set to ``value``."""
    out = copy.deepcopy(data)
    keys = path.split(".")
    node = out
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            node[k] = {}
        node = node[k]
    node[keys[-1]] = value
    return out


def apply_overrides(config: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    data = config.to_dict()
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        data = set_path(data, key.strip(), parse_value(raw))
    return ExperimentConfig.from_dict(data)


@dataclass
class SweepConfig:
    base: ExperimentConfig
    axes: list                      # [[dotted path, [values...]], ...]
    max_parallel: int = 1

    def validate(self) -> "SweepConfig":
        if not self.axes:
            raise ConfigError("sweep needs at least one axis")
        for axis in self.axes:
            if len(axis) != 2 or not isinstance(axis[0], str) or not list(axis[1]):
                raise ConfigError(f"axis {axis!r} must be [path, non-empty value list]")
        if self.max_parallel < 1:
            raise ConfigError("max_parallel must be >= 1")
        self.base.validate()
        return self

    @property
    def size(self) -> int:
        n = 1
        for _, values in self.axes:
            n *= len(values)
        return n

    def to_dict(self) -> dict:
        return {"base": self.base.to_dict(), "axes": [[p, list(v)] for p, v in self.axes],
                "max_parallel": self.max_parallel}

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        try:
            return cls(ExperimentConfig.from_dict(data["base"]),
                       [[a[0], list(a[1])] for a in data.get("axes", [])],
                       int(data.get("max_parallel", 1)))
        except (KeyError, TypeError, IndexError) as exc:
            raise ConfigError(f"malformed sweep config: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from None
