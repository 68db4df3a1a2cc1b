"""Challenge-isolating reinforcement learning environments, tabular agents
and a seeded experiment harness."""

from rlchallenges.core import (
    Box,
    Discrete,
    Environment,
    FrameStack,
    MultiDiscrete,
    RngStream,
    StepOutcome,
    discounted_return,
    framestack_wrap,
    state_key,
)
from rlchallenges.envs import ENVIRONMENTS, make

__version__ = "0.1.0"

__all__ = [
    "Box",
    "Discrete",
    "ENVIRONMENTS",
    "Environment",
    "FrameStack",
    "MultiDiscrete",
    "RngStream",
    "StepOutcome",
    "discounted_return",
    "framestack_wrap",
    "make",
    "state_key",
]
