"""Declarative experiment configuration stored as strict JSON."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from rlchallenges.agents import AGENTS, LearnerConfig
from rlchallenges.core import ConfigError
from rlchallenges.envs import ENVIRONMENTS

EVAL_PATTERN = re.compile(r"^(online|greedy-every-(\d+))$")
PLANNING_MODES = ("call-count", "wall-clock")
LEARNER_FIELDS = {f.name for f in fields(LearnerConfig)}


@dataclass
class RunSpec:
    """One curve in an experiment: an environment/agent pairing.

    ``learner`` holds LearnerConfig fields; ``options`` holds agent-specific
    keyword arguments such as ``obs_bins`` or ``explore_steps``.
    """

    label: str
    env: str
    agent: str
    env_params: dict[str, Any] = field(default_factory=dict)
    framestack: int | None = None
    learner: dict[str, Any] = field(default_factory=dict)
    options: dict[str, Any] = field(default_factory=dict)

    def learner_config(self) -> LearnerConfig:
        return LearnerConfig(**self.learner)

    def env_label(self) -> str:
        params = dict(self.env_params)
        if self.framestack is not None:
            params["framestack"] = self.framestack
        inner = " ".join(f"{k}={v}" for k, v in sorted(params.items()))
        return f"{self.env}({inner})" if inner else self.env


@dataclass
class ExperimentConfig:
    name: str
    runs: list[RunSpec]
    total_steps: int
    repetitions: int = 10
    base_seed: int = 0
    eval: str = "online"
    smoothing_window: int = 1
    planning_budget_mode: str = "call-count"
    log_interval: int = 1

    def __post_init__(self):
        self.validate()

    @property
    def eval_every(self) -> int | None:
        m = EVAL_PATTERN.match(self.eval)
        return int(m.group(2)) if m and m.group(2) else None

    def validate(self) -> None:
        if not self.runs:
            raise ConfigError("an experiment needs at least one run")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.total_steps < 0:
            raise ConfigError(f"total_steps must be >= 0, got {self.total_steps}")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be >= 0")
        if self.smoothing_window < 1:
            raise ConfigError(f"smoothing_window must be >= 1, got {self.smoothing_window}")
        if self.log_interval < 1:
            raise ConfigError(f"log_interval must be >= 1, got {self.log_interval}")
        m = EVAL_PATTERN.match(self.eval)
        if not m or (m.group(2) is not None and int(m.group(2)) < 1):
            raise ConfigError(f"eval must be 'online' or 'greedy-every-<k>', got {self.eval!r}")
        if self.planning_budget_mode not in PLANNING_MODES:
            raise ConfigError(f"planning_budget_mode must be one of {PLANNING_MODES}")
        labels = [r.label for r in self.runs]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"run labels must be unique: {labels}")
        for run in self.runs:
            if run.env not in ENVIRONMENTS:
                raise ConfigError(f"unknown environment {run.env!r} in run {run.label!r}")
            if run.agent not in AGENTS:
                raise ConfigError(f"unknown agent {run.agent!r} in run {run.label!r}")
            bad = set(run.learner) - LEARNER_FIELDS
            if bad:
                raise ConfigError(f"unknown learner keys {sorted(bad)} in run {run.label!r}")
            try:
                run.learner_config()
            except ValueError as exc:
                raise ConfigError(f"run {run.label!r}: {exc}") from None

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        _check_keys(data, {f.name for f in fields(cls)}, "config", required={"name", "runs", "total_steps"})
        if not isinstance(data["runs"], list):
            raise ConfigError("config.runs must be a list")
        runs = []
        for i, raw in enumerate(data["runs"]):
            if not isinstance(raw, dict):
                raise ConfigError(f"config.runs[{i}] must be an object")
            _check_keys(raw, {f.name for f in fields(RunSpec)}, f"config.runs[{i}]", required={"label", "env", "agent"})
            runs.append(RunSpec(**raw))
        rest = {k: v for k, v in data.items() if k != "runs"}
        for key in ("total_steps", "repetitions", "base_seed", "smoothing_window", "log_interval"):
            if key in rest and (not isinstance(rest[key], int) or isinstance(rest[key], bool)):
                raise ConfigError(f"config.{key} must be an integer, got {rest[key]!r}")
        return cls(runs=runs, **rest)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{source}: top level must be an object")
        try:
            return cls.from_dict(data)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from None


def _check_keys(data: dict, allowed: set[str], where: str, required: set[str]) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {where}")
    missing = sorted(required - set(data))
    if missing:
        raise ConfigError(f"missing key(s) {missing} in {where}")


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return ExperimentConfig.loads(text, str(path))


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(cfg.dumps())
