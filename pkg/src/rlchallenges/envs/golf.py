"""Golf: reach the green with swings whose spread grows with their length."""

from __future__ import annotations

import math

from rlchallenges.core import Discrete, Environment, MultiDiscrete, ParameterError

SWINGS = ("putt", "chip", "drive")
SWING_DISTANCES = (1, 3, 8)


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


class Golf(Environment):
    """Ball on a ``width`` x ``length`` grid; the flag sits at ``(width // 2, length - 1)``.

    Each swing moves the ball its nominal distance straight at the flag and
    adds a transverse Gaussian deflection with standard deviation
    ``stochasticity_level * distance**2``.
    """

    name = "golf"
    challenge = "Dynamics: Stochasticity"
    reward_range = (-1.0, 1.0)

    def __init__(
        self,
        width: int = 20,
        length: int = 40,
        stochasticity_level: float = 0.05,
        max_hits: int = 10,
        green_radius: float = 1.0,
        max_steps: int | None = None,
        seed: int = 0,
    ):
        if width < 1 or length < 2:
            raise ParameterError("course must be at least 1 x 2 cells")
        if stochasticity_level < 0:
            raise ParameterError("stochasticity_level must be >= 0")
        if max_hits < 1:
            raise ParameterError("max_hits must be >= 1")
        super().__init__(max_hits if max_steps is None else max_steps, seed)
        self.width = int(width)
        self.length = int(length)
        self.stochasticity_level = float(stochasticity_level)
        self.max_hits = int(max_hits)
        self.green_radius = float(green_radius)
        self.flag = (self.width // 2, self.length - 1)
        self.start = (self.width // 2, 0)
        self.observation_space = MultiDiscrete([self.width, self.length])
        self.action_space = Discrete(len(SWINGS))
        self.ball = self.start
        self.hits = 0

    def deflection_sigma(self, action: int) -> float:
        return self.stochasticity_level * SWING_DISTANCES[action] ** 2

    def sample_deflection(self, action: int) -> float:
        sigma = self.deflection_sigma(action)
        return self.rng.normal(0.0, sigma) if sigma > 0 else 0.0

    def set_ball(self, x: int, y: int, hits: int = 0) -> None:
        self.ball = (int(x), int(y))
        self.hits = int(hits)
        self.steps = hits
        self._active = True

    def _reset(self):
        self.ball = self.start
        self.hits = 0
        return self.ball

    def _on_green(self, x: float, y: float) -> bool:
        return math.hypot(x - self.flag[0], y - self.flag[1]) <= self.green_radius

    def _transition(self, action: int):
        bx, by = self.ball
        fx, fy = self.flag
        dist = math.hypot(fx - bx, fy - by)
        ux, uy = ((fx - bx) / dist, (fy - by) / dist) if dist > 0 else (0.0, 1.0)
        d = SWING_DISTANCES[action]
        deflection = self.sample_deflection(action)
        nx = bx + d * ux - deflection * uy
        ny = by + d * uy + deflection * ux
        cell = (_round_half_up(nx), _round_half_up(ny))
        self.hits += 1
        info = {"deflection": deflection}
        if not (0 <= cell[0] < self.width and 0 <= cell[1] < self.length):
            return self.ball, -1.0, True, dict(info, event="off_course")
        self.ball = cell
        if self._on_green(*cell):
            return cell, (self.max_hits - self.hits + 1) / self.max_hits, True, dict(info, event="green")
        if self.hits >= self.max_hits:
            return cell, -1.0, True, dict(info, event="out_of_hits")
        return cell, 0.0, False, info

    def render(self) -> str:
        lines = []
        for y in range(self.length - 1, -1, -1):
            row = []
            for x in range(self.width):
                if (x, y) == self.ball:
                    row.append("o")
                elif (x, y) == self.flag:
                    row.append("P")
                elif self._on_green(x, y):
                    row.append(":")
                else:
                    row.append(".")
            lines.append("".join(row))
        return "\n".join(lines) + f"\nhits {self.hits}/{self.max_hits}"

    def key_map(self) -> dict[str, int]:
        return {"p": 0, "c": 1, "d": 2}
