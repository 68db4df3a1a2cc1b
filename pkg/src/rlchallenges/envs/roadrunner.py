"""Roadrunner: sprint to the cliff edge without falling off."""

from __future__ import annotations

from rlchallenges.core import Discrete, Environment, MultiDiscrete, ParameterError

ACCELERATIONS = (-1, 0, 1)


class Roadrunner(Environment):
    """1-D track of ``width`` cells with the target at ``width - 1``.

    Actions 0/1/2 change the speed by -1/0/+1. The -1 per-step cost is
    always paid; landing on the target adds +1, overshooting it or braking
    below zero speed adds ``negative_reward`` and ends the episode.
    """

    name = "roadrunner"
    challenge = "Credit assignment: On/off-policy"
    deterministic = True
    default_max_steps = 100

    def __init__(
        self,
        width: int = 10,
        negative_reward: float = -100.0,
        max_speed: int = 3,
        max_steps: int | None = None,
        seed: int = 0,
    ):
        if width < 2:
            raise ParameterError(f"width must be >= 2, got {width}")
        if max_speed < 1:
            raise ParameterError(f"max_speed must be >= 1, got {max_speed}")
        super().__init__(max_steps, seed)
        self.width = int(width)
        self.target = self.width - 1
        self.negative_reward = float(negative_reward)
        self.max_speed = int(max_speed)
        self.observation_space = MultiDiscrete([self.width, self.max_speed + 1])
        self.action_space = Discrete(3)
        self.reward_range = (-1.0 + min(self.negative_reward, 0.0), 0.0)
        self.x = 0
        self.dx = 0

    def _reset(self):
        self.x, self.dx = 0, 0
        return (self.x, self.dx)

    def set_state(self, x: int, dx: int) -> None:
        """Place the runner directly, e.g. for exhaustive checks."""
        self.x, self.dx = int(x), int(dx)
        self.steps = 0
        self._active = True

    def _transition(self, action: int):
        dx = self.dx + ACCELERATIONS[action]
        if dx < 0:
            self.dx = 0
            return (self.x, 0), -1.0 + self.negative_reward, True, {"event": "stalled"}
        self.dx = min(dx, self.max_speed)
        x = self.x + self.dx
        if x > self.target:
            self.x = self.target
            return (self.x, self.dx), -1.0 + self.negative_reward, True, {"event": "cliff"}
        self.x = x
        if x == self.target:
            return (self.x, self.dx), 0.0, True, {"event": "target"}
        return (self.x, self.dx), -1.0, False, {}

    def render(self) -> str:
        track = ["."] * self.width
        track[self.target] = "|"
        track[min(self.x, self.target)] = "R"
        return "".join(track) + f"  speed={self.dx}"

    def key_map(self) -> dict[str, int]:
        return {"left": 0, "down": 1, "right": 2, "a": 0, "s": 1, "d": 2}
