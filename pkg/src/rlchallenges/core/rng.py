"""Seeded, splittable random streams.

Every stream wraps numpy's PCG64 bit generator seeded through a
``SeedSequence``. Child streams are derived from ``(seed, label)`` where the
label is hashed with SHA-256, so the derivation is stable across runs,
platforms and Python hash randomisation.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _label_entropy(label: str) -> int:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class RngStream:
    """A reproducible random stream identified by a 64-bit seed and a label path."""

    def __init__(self, seed: int = 0, path: tuple[int, ...] = ()):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed) & _MASK64
        self._path = tuple(path)
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.seed, *self._path]))
        )

    def child(self, label: str) -> "RngStream":
        """Independent stream for ``label``; same label always gives the same stream."""
        return RngStream(self.seed, self._path + (_label_entropy(label),))

    def reseed(self, seed: int) -> None:
        fresh = RngStream(seed, self._path)
        self.seed = fresh.seed
        self.generator = fresh.generator

    # thin conveniences used throughout the envs and agents
    def random(self) -> float:
        return float(self.generator.random())

    def integers(self, low: int, high: int | None = None) -> int:
        return int(self.generator.integers(low, high))

    def normal(self, loc: float = 0.0, scale: float = 1.0) -> float:
        return float(self.generator.normal(loc, scale))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, depth={len(self._path)})"
