"""Supermarket: collect three items and leave, with a slow real step and a free model."""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from rlchallenges.core import (
    Discrete,
    Environment,
    InvalidStateError,
    ParameterError,
    RngStream,
)

MOVES = {0: (0, -1), 1: (0, 1), 2: (-1, 0), 3: (1, 0)}  # up, down, left, right
ACTION_NAMES = ("up", "down", "left", "right")
STEP_REWARD = -1.0
ITEM_REWARD = 25.0
EXIT_REWARD = 50.0
GRID = 10
NUM_STATES = GRID * GRID * 8


@dataclass(frozen=True)
class StoreMap:
    walls: frozenset[tuple[int, int]]
    items: tuple[tuple[int, int], ...]
    start: tuple[int, int]
    exit: tuple[int, int]

    @classmethod
    def parse(cls, text: str) -> "StoreMap":
        rows = [line.rstrip("\n") for line in text.strip().splitlines()]
        if len(rows) != GRID or any(len(r) != GRID for r in rows):
            raise ParameterError(f"store map must be {GRID}x{GRID} characters")
        walls, items, start, exit_ = set(), {}, None, None
        for y, row in enumerate(rows):
            for x, ch in enumerate(row):
                if ch == "#":
                    walls.add((x, y))
                elif ch in "123":
                    items[int(ch)] = (x, y)
                elif ch == "S":
                    start = (x, y)
                elif ch == "E":
                    exit_ = (x, y)
                elif ch != ".":
                    raise ParameterError(f"unknown map character {ch!r} at ({x}, {y})")
        if start is None or exit_ is None or sorted(items) != [1, 2, 3]:
            raise ParameterError("store map needs S, E and items 1, 2, 3")
        return cls(frozenset(walls), tuple(items[i] for i in (1, 2, 3)), start, exit_)

    @classmethod
    def default(cls) -> "StoreMap":
        text = resources.files("rlchallenges.envs").joinpath("supermarket_map.txt").read_text()
        return cls.parse(text)

    def walkable(self, x: int, y: int) -> bool:
        return 0 <= x < GRID and 0 <= y < GRID and (x, y) not in self.walls


def encode_state(x: int, y: int, flags: tuple[int, int, int]) -> int:
    return y * GRID + x + GRID * GRID * (flags[0] + 2 * flags[1] + 4 * flags[2])


def decode_state(state_id: int) -> tuple[int, int, tuple[int, int, int]]:
    pos, code = state_id % (GRID * GRID), state_id // (GRID * GRID)
    return pos % GRID, pos // GRID, (code & 1, (code >> 1) & 1, (code >> 2) & 1)


@dataclass
class ModelPrediction:
    """Descriptive model output for one (state, action) pair."""

    next_states: np.ndarray
    probabilities: np.ndarray
    reward: float
    terminated: np.ndarray


class Supermarket(Environment):
    name = "supermarket"
    challenge = "Model-based reinforcement learning"
    deterministic = True
    default_max_steps = 1000
    reward_range = (-1.0, 49.0)

    def __init__(
        self,
        step_timeout: float = 0.0,
        noise: float = 0.0,
        map_path: str | Path | None = None,
        max_steps: int | None = None,
        seed: int = 0,
    ):
        if step_timeout < 0 or noise < 0:
            raise ParameterError("step_timeout and noise must be >= 0")
        super().__init__(max_steps, seed)
        self.step_timeout = float(step_timeout)
        self.noise = float(noise)
        self.store = StoreMap.parse(Path(map_path).read_text()) if map_path else StoreMap.default()
        self.observation_space = Discrete(NUM_STATES)
        self.action_space = Discrete(4)
        self.model_rng = RngStream(self.seed).child("model")
        self.model_calls = 0
        self.pos = self.store.start
        self.flags = (0, 0, 0)
        self._last_step = None

    # -- state encoding ---------------------------------------------------

    @property
    def state_id(self) -> int:
        return encode_state(*self.pos, self.flags)

    def is_valid_state(self, state_id: int) -> bool:
        if not 0 <= state_id < NUM_STATES:
            return False
        x, y, flags = decode_state(state_id)
        if not self.store.walkable(x, y):
            return False
        # standing on an item means it has been collected
        return all(flags[i] for i, cell in enumerate(self.store.items) if cell == (x, y))

    def is_terminal_state(self, state_id: int) -> bool:
        x, y, _ = decode_state(state_id)
        return (x, y) == self.store.exit

    def valid_states(self) -> list[int]:
        return [s for s in range(NUM_STATES) if self.is_valid_state(s)]

    def set_state(self, state_id: int) -> None:
        if not self.is_valid_state(state_id) or self.is_terminal_state(state_id):
            raise InvalidStateError(f"cannot place the agent in state {state_id}")
        x, y, self.flags = decode_state(state_id)
        self.pos = (x, y)
        self.steps = 0
        self._active = True

    # -- dynamics ---------------------------------------------------------

    def _move(self, pos, flags, action):
        """Pure transition: returns (pos, flags, reward, terminated)."""
        dx, dy = MOVES[action]
        nx, ny = pos[0] + dx, pos[1] + dy
        if not self.store.walkable(nx, ny):
            nx, ny = pos
        reward = STEP_REWARD
        flags = list(flags)
        for i, cell in enumerate(self.store.items):
            if (nx, ny) == cell and not flags[i]:
                flags[i] = 1
                reward += ITEM_REWARD
        terminated = (nx, ny) == self.store.exit
        if terminated:
            reward += EXIT_REWARD
        return (nx, ny), tuple(flags), reward, terminated

    def _reset(self) -> int:
        self.pos = self.store.start
        self.flags = (0, 0, 0)
        return self.state_id

    def _transition(self, action: int):
        if self.step_timeout > 0:
            self._wait()
        self.pos, self.flags, reward, terminated = self._move(self.pos, self.flags, action)
        return self.state_id, reward, terminated, {}

    def _wait(self) -> None:
        # the step is unavailable until step_timeout has passed since the previous one
        now = time.monotonic()
        if self._last_step is not None:
            remaining = self._last_step + self.step_timeout - now
            if remaining > 0:
                time.sleep(remaining)
        else:
            time.sleep(self.step_timeout)
        self._last_step = time.monotonic()

    def next_step_available_at(self) -> float:
        """Monotonic time at which ``step`` stops blocking."""
        if self._last_step is None:
            return time.monotonic()
        return self._last_step + self.step_timeout

    # -- model ------------------------------------------------------------

    def model(self, state_id: int, action: int, mode: str = "descriptive", rng: RngStream | None = None):
        """Query the environment model without advancing time.

        ``descriptive`` returns a :class:`ModelPrediction`; ``generative``
        returns a sampled ``(next_state, reward, terminated)``. Rewards get
        independent ``Normal(0, noise**2)`` perturbations on every call.
        """
        if not self.is_valid_state(state_id):
            raise InvalidStateError(f"state {state_id} is a wall or unreachable")
        if action not in MOVES:
            raise InvalidStateError(f"unknown action {action}")
        if mode not in ("descriptive", "generative"):
            raise ParameterError(f"mode must be 'descriptive' or 'generative', got {mode!r}")
        rng = rng or self.model_rng
        self.model_calls += 1
        x, y, flags = decode_state(state_id)
        if (x, y) == self.store.exit:
            nxt, reward, terminated = state_id, 0.0, True
        else:
            pos, flags, reward, terminated = self._move((x, y), flags, action)
            nxt = encode_state(*pos, flags)
        if self.noise > 0:
            reward += rng.normal(0.0, self.noise)
        if mode == "generative":
            return nxt, float(reward), terminated
        return ModelPrediction(
            next_states=np.array([nxt]),
            probabilities=np.array([1.0]),
            reward=float(reward),
            terminated=np.array([terminated]),
        )

    # -- presentation -----------------------------------------------------

    def render(self) -> str:
        lines = []
        for y in range(GRID):
            row = []
            for x in range(GRID):
                if (x, y) == self.pos:
                    row.append("@")
                elif (x, y) in self.store.walls:
                    row.append("#")
                elif (x, y) in self.store.items:
                    i = self.store.items.index((x, y))
                    row.append("." if self.flags[i] else str(i + 1))
                elif (x, y) == self.store.exit:
                    row.append("E")
                else:
                    row.append(".")
            lines.append("".join(row))
        return "\n".join(lines) + f"\nbasket {self.flags}"

    def key_map(self) -> dict[str, int]:
        return {"up": 0, "down": 1, "left": 2, "right": 3, "w": 0, "s": 1, "a": 2, "d": 3}
