"""MemoryCorridor: replay an ever-growing sequence of doors from memory."""

from __future__ import annotations

from rlchallenges.core import Discrete, Environment, ParameterError


class MemoryCorridor(Environment):
    """Partially observable door-sequence task.

    Only the last door of the current corridor is marked in the
    observation; every other step shows the "no door marked" symbol
    ``num_doors``. Finishing a corridor of length ``L`` starts a corridor of
    length ``L + 1`` that repeats the same doors plus one new random door.
    """

    name = "memory_corridor"
    challenge = "State: Partial observability"
    default_max_steps = 500
    reward_range = (0.0, 1.0)

    def __init__(self, num_doors: int = 3, max_steps: int | None = None, seed: int = 0):
        if num_doors < 2:
            raise ParameterError(f"num_doors must be >= 2, got {num_doors}")
        super().__init__(max_steps, seed)
        self.num_doors = int(num_doors)
        self.no_door = self.num_doors
        self.observation_space = Discrete(self.num_doors + 1)
        self.action_space = Discrete(self.num_doors)
        self.door_sequence: list[int] = []
        self.length = 1
        self.depth = 1
        self.doors_opened = 0

    @property
    def corridor_length(self) -> int:
        return self.length

    def _observe(self) -> int:
        return self.door_sequence[self.length - 1] if self.depth == self.length else self.no_door

    def _reset(self) -> int:
        self.door_sequence = [self.rng.integers(self.num_doors)]
        self.length = 1
        self.depth = 1
        self.doors_opened = 0
        return self._observe()

    def _transition(self, action: int):
        if action != self.door_sequence[self.depth - 1]:
            return self.no_door, 0.0, True, {"corridor_length": self.length, "doors_opened": self.doors_opened}
        self.doors_opened += 1
        if self.depth < self.length:
            self.depth += 1
        else:
            self.door_sequence.append(self.rng.integers(self.num_doors))
            self.length += 1
            self.depth = 1
        return self._observe(), 1.0, False, {"corridor_length": self.length, "doors_opened": self.doors_opened}

    def render(self) -> str:
        doors = []
        obs = self._observe()
        for i in range(self.num_doors):
            doors.append(f"[{'*' if obs == i else i}]")
        return f"corridor length {self.length}, door {self.depth}/{self.length}\n" + " ".join(doors)

    def key_map(self) -> dict[str, int]:
        return {str(i): i for i in range(min(self.num_doors, 10))}
