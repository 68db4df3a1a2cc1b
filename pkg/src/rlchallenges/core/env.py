"""Episodic environment protocol shared by every environment in the suite."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from rlchallenges.core.errors import InvalidActionError, ParameterError, ProtocolError
from rlchallenges.core.rng import RngStream
from rlchallenges.core.spaces import Space


@dataclass
class StepOutcome:
    observation: Any
    reward: float
    terminated: bool
    truncated: bool = False
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def done(self) -> bool:
        return self.terminated or self.truncated

    def __iter__(self):
        # allows ``obs, r, term, trunc, info = env.step(a)``
        return iter((self.observation, self.reward, self.terminated, self.truncated, self.info))


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """Sum of ``gamma**i * rewards[i]``; 0 for an empty sequence."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    total = 0.0
    # Horner's scheme, evaluated back to front
    for r in reversed(rewards):
        total = r + gamma * total
    return float(total)


class Environment:
    """Base class: subclasses provide ``_reset`` and ``_transition``.

    The base class owns the episode protocol. It validates actions, counts
    steps, raises on stepping a finished episode and sets ``truncated`` when
    the step counter reaches ``max_steps`` without termination.

    Randomness comes from two child streams of the construction seed:
    ``layout`` for per-instance quantities fixed at construction, and
    ``dynamics`` for per-episode draws. ``reset(seed)`` reseeds the dynamics
    stream only, so the instance layout stays fixed for its lifetime.
    """

    observation_space: Space
    action_space: Space
    reward_range: tuple[float, float] = (float("-inf"), float("inf"))
    default_max_steps: int = 1000
    deterministic: bool = False
    name: str = ""
    challenge: str = ""

    def __init__(self, max_steps: int | None = None, seed: int = 0):
        max_steps = self.default_max_steps if max_steps is None else int(max_steps)
        if max_steps < 1:
            raise ParameterError(f"max_steps must be positive, got {max_steps}")
        self.max_steps = max_steps
        self.seed = int(seed)
        root = RngStream(self.seed)
        self.layout_rng = root.child("layout")
        self.rng = root.child("dynamics")
        self.steps = 0
        self._active = False

    # -- protocol ---------------------------------------------------------

    def reset(self, seed: int | None = None) -> Any:
        if seed is not None:
            self.rng = RngStream(int(seed)).child("dynamics")
        self.steps = 0
        self._active = True
        return self._reset()

    def step(self, action: Any) -> StepOutcome:
        if not self._active:
            raise ProtocolError(
                f"{type(self).__name__}.step() called without an active episode; call reset() first"
            )
        action = self._check_action(action)
        obs, reward, terminated, info = self._transition(action)
        self.steps += 1
        truncated = False
        if terminated:
            self._active = False
        elif self.steps >= self.max_steps:
            truncated = True
            self._active = False
        return StepOutcome(obs, float(reward), bool(terminated), truncated, info)

    @property
    def active(self) -> bool:
        return self._active

    def _check_action(self, action: Any) -> Any:
        if not self.action_space.contains(action):
            raise InvalidActionError(f"action {action!r} is not in {self.action_space}")
        return action

    # -- subclass hooks ---------------------------------------------------

    def _reset(self) -> Any:
        raise NotImplementedError

    def _transition(self, action: Any) -> tuple[Any, float, bool, dict[str, Any]]:
        raise NotImplementedError

    def render(self) -> str:
        return repr(self)

    def key_map(self) -> dict[str, Any]:
        """Keyboard bindings for terminal play, key -> action."""
        return {}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(seed={self.seed})"
