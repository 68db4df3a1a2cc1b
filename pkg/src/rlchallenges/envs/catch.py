"""Catch: move a paddle to catch a falling ball, with selectable observation encodings."""

from __future__ import annotations

import numpy as np

from rlchallenges.core import Box, Discrete, Environment, MultiDiscrete, ParameterError

OBSERVATION_TYPES = ("vectorised", "grid", "rgb")
BALL_RGB = (255, 0, 0)
PADDLE_RGB = (0, 0, 255)


class Catch(Environment):
    name = "catch"
    challenge = "State: Dimensionality"
    deterministic = False
    reward_range = (-1.0, 1.0)

    def __init__(
        self,
        rows: int = 7,
        columns: int = 7,
        observation_type: str = "vectorised",
        max_steps: int | None = None,
        seed: int = 0,
    ):
        if rows < 3 or columns < 3:
            raise ParameterError("rows and columns must be >= 3")
        if observation_type == "default":
            observation_type = "grid"
        if observation_type not in OBSERVATION_TYPES:
            raise ParameterError(f"observation_type must be one of {OBSERVATION_TYPES}")
        super().__init__(rows if max_steps is None else max_steps, seed)
        self.rows = int(rows)
        self.columns = int(columns)
        self.observation_type = observation_type
        self.action_space = Discrete(3)
        if observation_type == "vectorised":
            self.observation_space = MultiDiscrete([self.columns, self.rows, self.columns])
        elif observation_type == "grid":
            self.observation_space = Box(0.0, 1.0, (self.rows, self.columns))
        else:
            self.observation_space = Box(0.0, 255.0, (self.rows, self.columns, 3))
        self.bx = self.by = 0
        self.px = self.columns // 2

    def _reset(self):
        self.px = self.columns // 2
        self.by = 0
        self.bx = self.rng.integers(self.columns)
        return self.observe()

    def _transition(self, action: int):
        self.px = min(max(self.px + action - 1, 0), self.columns - 1)
        self.by += 1
        if self.by == self.rows - 1:
            caught = self.bx == self.px
            return self.observe(), 1.0 if caught else -1.0, True, {"caught": caught}
        return self.observe(), 0.0, False, {}

    def observe(self):
        return render_observation(self.bx, self.by, self.px, self.rows, self.columns, self.observation_type)

    def render(self) -> str:
        grid = [["."] * self.columns for _ in range(self.rows)]
        grid[self.rows - 1][self.px] = "="
        grid[self.by][self.bx] = "o" if grid[self.by][self.bx] == "." else "*"
        return "\n".join("".join(r) for r in grid)

    def key_map(self) -> dict[str, int]:
        return {"left": 0, "down": 1, "right": 2, "a": 0, "s": 1, "d": 2}


def render_observation(bx: int, by: int, px: int, rows: int, columns: int, kind: str):
    if kind == "vectorised":
        return (bx, by, px)
    grid = np.zeros((rows, columns))
    grid[by, bx] = 1.0
    grid[rows - 1, px] = 1.0
    if kind == "grid":
        return grid
    img = np.zeros((rows, columns, 3))
    img[by, bx] += BALL_RGB
    img[rows - 1, px] += PADDLE_RGB
    return img


def decode_observation(obs, rows: int, kind: str) -> tuple[int, int, int]:
    """Recover ``(bx, by, px)`` from any observation encoding."""
    if kind == "vectorised":
        return tuple(int(v) for v in obs)
    arr = np.asarray(obs)
    if kind == "grid":
        paddle_cols = np.flatnonzero(arr[rows - 1])
        above = np.argwhere(arr[: rows - 1])
        if len(above) == 1 and len(paddle_cols) == 1:
            by, bx = above[0]
            return int(bx), int(by), int(paddle_cols[0])
        if len(above) == 0 and len(paddle_cols) == 1:
            # ball landed on the paddle
            return int(paddle_cols[0]), rows - 1, int(paddle_cols[0])
        raise ValueError("ball and paddle are indistinguishable in this grid")
    red, blue = arr[..., 0], arr[..., 2]
    (by, bx), = zip(*np.nonzero(red))
    (_, px), = zip(*np.nonzero(blue))
    return int(bx), int(by), int(px)
