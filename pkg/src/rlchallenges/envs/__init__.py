"""The nine challenge environments and a name registry."""

from __future__ import annotations

from rlchallenges.core import ConfigError, framestack_wrap
from rlchallenges.envs.boulder import Boulder
from rlchallenges.envs.catch import Catch
from rlchallenges.envs.golf import Golf
from rlchallenges.envs.memory_corridor import MemoryCorridor
from rlchallenges.envs.roadrunner import Roadrunner
from rlchallenges.envs.study import Study
from rlchallenges.envs.supermarket import Supermarket
from rlchallenges.envs.tamagotchi import Tamagotchi
from rlchallenges.envs.trashbot import Trashbot

# ordered a-i
ENVIRONMENTS = {
    cls.name: cls
    for cls in (Boulder, Roadrunner, Study, Catch, MemoryCorridor, Tamagotchi, Trashbot, Golf, Supermarket)
}

VARIABLE_PARAMETERS = {
    "boulder": ("height", "num_grips"),
    "roadrunner": ("width", "negative_reward", "max_speed"),
    "study": (
        "num_other_actions",
        "reward_noise_mean",
        "reward_noise_sigma",
        "total_days",
        "lecture_days",
        "lectures_needed",
        "energy_needed",
    ),
    "catch": ("rows", "columns", "observation_type"),
    "memory_corridor": ("num_doors",),
    "tamagotchi": ("tau", "max_msg_length", "vocab_size"),
    "trashbot": ("action_mode", "num_bins", "container_width"),
    "golf": ("stochasticity_level", "width", "length"),
    "supermarket": ("step_timeout", "noise"),
}


def make(name: str, framestack: int | None = None, **params):
    """Build an environment by registry name, optionally framestacked."""
    try:
        cls = ENVIRONMENTS[name]
    except KeyError:
        raise ConfigError(f"unknown environment {name!r}; available: {', '.join(ENVIRONMENTS)}") from None
    try:
        env = cls(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for environment {name!r}: {exc}") from None
    if framestack is not None:
        env = framestack_wrap(env, framestack)
    return env


__all__ = [
    "Boulder",
    "Catch",
    "ENVIRONMENTS",
    "Golf",
    "MemoryCorridor",
    "Roadrunner",
    "Study",
    "Supermarket",
    "Tamagotchi",
    "Trashbot",
    "VARIABLE_PARAMETERS",
    "make",
]
