"""Tabular state keys and the framestacking observation wrapper."""

from __future__ import annotations

from collections import deque
from typing import Any, Sequence

import numpy as np

from rlchallenges.core.env import StepOutcome
from rlchallenges.core.errors import ParameterError, UnsupportedError
from rlchallenges.core.spaces import Box, Discrete, MultiDiscrete, Space


class Discretizer:
    """Uniform binning of a bounded Box observation into a countable key."""

    def __init__(self, low, high, bins: int | Sequence[int]):
        self.low = np.asarray(low, dtype=float).ravel()
        self.high = np.asarray(high, dtype=float).ravel()
        self.bins = np.broadcast_to(np.asarray(bins, dtype=int), self.low.shape).copy()
        if np.any(self.bins < 1):
            raise ParameterError("every dimension needs at least one bin")
        if not (np.all(np.isfinite(self.low)) and np.all(np.isfinite(self.high))):
            raise ParameterError("Discretizer needs finite bounds")

    @classmethod
    def for_space(cls, space: Box, bins: int | Sequence[int]) -> "Discretizer":
        return cls(space.low, space.high, bins)

    def indices(self, value) -> np.ndarray:
        arr = np.asarray(value, dtype=float).ravel()
        width = np.where(self.high > self.low, self.high - self.low, 1.0)
        idx = np.floor((arr - self.low) / width * self.bins).astype(int)
        return np.clip(idx, 0, self.bins - 1)

    def key(self, value) -> int:
        return mixed_radix(self.indices(value).tolist(), self.bins.tolist())


def mixed_radix(digits: Sequence[int], radices: Sequence[int]) -> int:
    """Encode ``digits`` with the first digit least significant."""
    key = 0
    scale = 1
    for d, r in zip(digits, radices):
        key += int(d) * scale
        scale *= int(r)
    return key


def state_key(observation: Any, space: Space, discretizer: Discretizer | None = None) -> int:
    """Injective integer key of an observation, used to index value tables."""
    if isinstance(space, Discrete):
        return int(observation)
    if isinstance(space, MultiDiscrete):
        return mixed_radix(observation, space.dims)
    if discretizer is not None:
        return discretizer.key(observation)
    raise UnsupportedError(
        f"cannot build a tabular key for {space!r} without a discretizer"
    )


class FrameStack:
    """Present the ``k`` most recent base observations as one joint observation.

    Base observations are first reduced to their integer key. At episode
    start missing history slots hold a padding symbol equal to the base
    space size, so the wrapped space is ``MultiDiscrete([size + 1] * k)``,
    oldest frame first.
    """

    def __init__(self, env, k: int):
        if int(k) < 1:
            raise ParameterError(f"framestack length must be >= 1, got {k}")
        base = env.observation_space
        if not isinstance(base, (Discrete, MultiDiscrete)):
            raise UnsupportedError("framestacking needs a discrete or multi-discrete base space")
        self.env = env
        self.k = int(k)
        self.base_size = base.size
        self.pad = base.size
        self.observation_space = MultiDiscrete([base.size + 1] * self.k)
        self._frames: deque[int] = deque(maxlen=self.k)

    def _push(self, observation) -> tuple[int, ...]:
        self._frames.append(state_key(observation, self.env.observation_space))
        return tuple(self._frames)

    def reset(self, seed: int | None = None) -> tuple[int, ...]:
        obs = self.env.reset(seed)
        self._frames.clear()
        self._frames.extend([self.pad] * self.k)
        return self._push(obs)

    def step(self, action) -> StepOutcome:
        out = self.env.step(action)
        return StepOutcome(self._push(out.observation), out.reward, out.terminated, out.truncated, out.info)

    @property
    def action_space(self) -> Space:
        return self.env.action_space

    @property
    def unwrapped(self):
        return getattr(self.env, "unwrapped", self.env)

    def __getattr__(self, name: str):
        # delegate everything else (render, max_steps, rng, ...) to the base env
        if name == "env":
            raise AttributeError(name)
        return getattr(self.env, name)

    def __repr__(self) -> str:
        return f"FrameStack({self.env!r}, k={self.k})"


def framestack_wrap(env, k: int) -> FrameStack:
    return FrameStack(env, k)
