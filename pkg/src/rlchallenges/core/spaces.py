"""Observation and action space descriptors."""

from __future__ import annotations

from math import prod
from typing import Any, Sequence

import numpy as np

from rlchallenges.core.errors import ParameterError
from rlchallenges.core.rng import RngStream


class Space:
    kind: str = ""

    def contains(self, value: Any) -> bool:
        raise NotImplementedError

    def sample(self, rng: RngStream) -> Any:
        raise NotImplementedError

    @property
    def countable(self) -> bool:
        return False

    def __contains__(self, value: Any) -> bool:
        return self.contains(value)


def _is_int(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, (bool, np.bool_))


class Discrete(Space):
    """Integers ``0 .. n-1``."""

    kind = "discrete"

    def __init__(self, n: int):
        if n < 1:
            raise ParameterError(f"Discrete space needs n >= 1, got {n}")
        self.n = int(n)

    def contains(self, value: Any) -> bool:
        return _is_int(value) and 0 <= value < self.n

    def sample(self, rng: RngStream) -> int:
        return rng.integers(self.n)

    @property
    def countable(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Discrete) and other.n == self.n

    def __repr__(self) -> str:
        return f"Discrete({self.n})"


class MultiDiscrete(Space):
    """Tuples whose i-th entry lies in ``0 .. dims[i]-1``."""

    kind = "multi_discrete"

    def __init__(self, dims: Sequence[int]):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise ParameterError(f"MultiDiscrete dims must all be >= 1, got {dims}")
        self.dims = dims

    def contains(self, value: Any) -> bool:
        try:
            items = tuple(value)
        except TypeError:
            return False
        return len(items) == len(self.dims) and all(
            _is_int(v) and 0 <= v < d for v, d in zip(items, self.dims)
        )

    def sample(self, rng: RngStream) -> tuple[int, ...]:
        return tuple(rng.integers(d) for d in self.dims)

    @property
    def countable(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return prod(self.dims)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MultiDiscrete) and other.dims == self.dims

    def __repr__(self) -> str:
        return f"MultiDiscrete({list(self.dims)})"


class Box(Space):
    """Real arrays of a fixed shape with elementwise bounds."""

    kind = "box"

    def __init__(self, low, high, shape: Sequence[int] | None = None):
        if shape is None:
            shape = np.shape(low)
        self.shape = tuple(int(s) for s in shape)
        self.low = np.broadcast_to(np.asarray(low, dtype=float), self.shape).copy()
        self.high = np.broadcast_to(np.asarray(high, dtype=float), self.shape).copy()
        if np.any(self.low > self.high):
            raise ParameterError("Box requires low <= high elementwise")

    def contains(self, value: Any) -> bool:
        arr = np.asarray(value, dtype=float)
        if arr.shape != self.shape or not np.all(np.isfinite(arr)):
            return False
        return bool(np.all(arr >= self.low) and np.all(arr <= self.high))

    def sample(self, rng: RngStream) -> np.ndarray:
        return rng.generator.uniform(self.low, self.high)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Box)
            and other.shape == self.shape
            and np.array_equal(other.low, self.low)
            and np.array_equal(other.high, self.high)
        )

    def __repr__(self) -> str:
        return f"Box(low={self.low.min()}, high={self.high.max()}, shape={self.shape})"
