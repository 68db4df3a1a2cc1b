"""Tabular action-value storage and action selection."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from rlchallenges.core import ParameterError, RngStream


class ValueTable:
    """Sparse Q(s, a) table; rows are created lazily and start at ``q0``."""

    def __init__(self, num_actions: int, q0: float = 0.0):
        if num_actions < 1:
            raise ParameterError("num_actions must be >= 1")
        self.num_actions = int(num_actions)
        self.q0 = float(q0)
        self._rows: dict[int, list[float]] = {}

    def row(self, s: int) -> list[float]:
        """Mutable row for ``s`` (created on first access)."""
        r = self._rows.get(s)
        if r is None:
            r = self._rows[s] = [self.q0] * self.num_actions
        return r

    def values(self, s: int) -> list[float]:
        """Read-only view: absent states give a fresh row of ``q0``."""
        r = self._rows.get(s)
        return list(r) if r is not None else [self.q0] * self.num_actions

    def get(self, s: int, a: int) -> float:
        r = self._rows.get(s)
        return self.q0 if r is None else r[a]

    def set(self, s: int, a: int, value: float) -> None:
        self.row(s)[a] = float(value)

    def max(self, s: int) -> float:
        r = self._rows.get(s)
        return self.q0 if r is None else max(r)

    def greedy_actions(self, s: int) -> list[int]:
        r = self._rows.get(s)
        if r is None:
            return list(range(self.num_actions))
        best = max(r)
        return [a for a, v in enumerate(r) if v == best]

    def states(self) -> list[int]:
        return list(self._rows)

    def items(self) -> Iterator[tuple[int, int, float]]:
        for s in sorted(self._rows):
            for a, v in enumerate(self._rows[s]):
                yield s, a, v

    def __len__(self) -> int:
        return len(self._rows) * self.num_actions

    def __contains__(self, s: int) -> bool:
        return s in self._rows

    def copy(self) -> "ValueTable":
        other = ValueTable(self.num_actions, self.q0)
        other._rows = {s: list(r) for s, r in self._rows.items()}
        return other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValueTable):
            return NotImplemented
        keys = set(self._rows) | set(other._rows)
        return self.num_actions == other.num_actions and all(
            self.values(s) == other.values(s) for s in keys
        )

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state", "action", "value"])
            for s, a, v in self.items():
                writer.writerow([s, a, repr(v)])

    @classmethod
    def from_csv(cls, path: str | Path, num_actions: int, q0: float = 0.0) -> "ValueTable":
        table = cls(num_actions, q0)
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                table.set(int(rec["state"]), int(rec["action"]), float(rec["value"]))
        return table


def greedy_action(q: ValueTable, s: int, rng: RngStream) -> int:
    """argmax_a Q(s, a) with ties broken uniformly at random."""
    best = q.greedy_actions(s)
    return best[0] if len(best) == 1 else best[rng.integers(len(best))]


def epsilon_greedy(q: ValueTable, s: int, epsilon: float, rng: RngStream) -> int:
    if not 0.0 <= epsilon <= 1.0:
        raise ParameterError(f"epsilon must lie in [0, 1], got {epsilon}")
    if epsilon > 0.0 and rng.random() < epsilon:
        return rng.integers(q.num_actions)
    return greedy_action(q, s, rng)


@dataclass
class LearnerConfig:
    """Hyperparameters shared by the tabular learners.

    ``n`` is the backup depth for n-step SARSA; ``None`` means Monte Carlo.
    ``alpha_schedule`` is ``"constant"`` or ``"visits"`` (alpha = 1 / N(s, a)).
    """

    alpha: float = 0.1
    gamma: float = 1.0
    epsilon: float = 0.1
    q0: float = 0.0
    n: int | None = 1
    beta: float = 0.0
    kappa: float = 0.0
    planning_budget: int = 0
    theta: float = 1e-4
    alpha_schedule: str = "constant"

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ParameterError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.n is not None and self.n < 1:
            raise ParameterError(f"n must be >= 1 or None, got {self.n}")
        if self.beta < 0:
            raise ParameterError("beta must be >= 0")
        if not -1.0 < self.kappa < 1.0:
            raise ParameterError(f"kappa must lie in (-1, 1), got {self.kappa}")
        if self.planning_budget < 0:
            raise ParameterError("planning_budget must be >= 0")
        if self.theta < 0:
            raise ParameterError("theta must be >= 0")
        if self.alpha_schedule not in ("constant", "visits"):
            raise ParameterError("alpha_schedule must be 'constant' or 'visits'")
