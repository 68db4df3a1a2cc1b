from rlchallenges.core.env import Environment, StepOutcome, discounted_return
from rlchallenges.core.errors import (
    ConfigError,
    ContractViolation,
    InvalidActionError,
    InvalidStateError,
    ModelError,
    ParameterError,
    ProtocolError,
    RLChallengeError,
    UnsupportedError,
)
from rlchallenges.core.rng import RngStream
from rlchallenges.core.spaces import Box, Discrete, MultiDiscrete, Space
from rlchallenges.core.wrappers import (
    Discretizer,
    FrameStack,
    framestack_wrap,
    mixed_radix,
    state_key,
)

__all__ = [
    "Box",
    "ConfigError",
    "ContractViolation",
    "Discrete",
    "Discretizer",
    "Environment",
    "FrameStack",
    "InvalidActionError",
    "InvalidStateError",
    "ModelError",
    "MultiDiscrete",
    "ParameterError",
    "ProtocolError",
    "RLChallengeError",
    "RngStream",
    "Space",
    "StepOutcome",
    "UnsupportedError",
    "discounted_return",
    "framestack_wrap",
    "mixed_radix",
    "state_key",
]
