"""Boulder: a sparse-reward climbing wall for studying exploration."""

from __future__ import annotations

from rlchallenges.core import Discrete, Environment, ParameterError


class Boulder(Environment):
    """Climb ``height`` grips; one of ``num_grips`` holds at every height.

    Observation is the current height. Height ``H`` (the top) is emitted
    only on the terminating step, so the observation space is
    ``Discrete(H + 1)``. A wrong grip drops the climber back to height 0.
    The correct grip per height is drawn once per instance.
    """

    name = "boulder"
    challenge = "Exploration"
    deterministic = True
    reward_range = (0.0, 1.0)

    def __init__(self, height: int = 10, num_grips: int = 3, max_steps: int | None = None, seed: int = 0):
        if height < 1:
            raise ParameterError(f"height must be >= 1, got {height}")
        if num_grips < 2:
            raise ParameterError(f"num_grips must be >= 2, got {num_grips}")
        self.height = int(height)
        self.num_grips = int(num_grips)
        if max_steps is None:
            max_steps = 10 * self.num_grips ** min(self.height, 6)
        super().__init__(max_steps, seed)
        self.observation_space = Discrete(self.height + 1)
        self.action_space = Discrete(self.num_grips)
        self.correct_grip = [self.layout_rng.integers(self.num_grips) for _ in range(self.height)]
        self.h = 0

    def _reset(self) -> int:
        self.h = 0
        return self.h

    def _transition(self, action: int):
        if action == self.correct_grip[self.h]:
            self.h += 1
            if self.h == self.height:
                return self.h, 1.0, True, {}
            return self.h, 0.0, False, {}
        self.h = 0
        return self.h, 0.0, False, {"fell": True}

    def render(self) -> str:
        rows = []
        for level in range(self.height, -1, -1):
            marker = "@" if level == self.h else " "
            label = "top" if level == self.height else f"{level:3d}"
            rows.append(f"{label} |{marker}|")
        return "\n".join(rows)

    def key_map(self) -> dict[str, int]:
        return {str(i + 1): i for i in range(min(self.num_grips, 9))}
