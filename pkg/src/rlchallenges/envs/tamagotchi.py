"""Tamagotchi: keep a virtual pet happy from its HP and its noisy utterances."""

from __future__ import annotations

import numpy as np

from rlchallenges.core import Discrete, Environment, MultiDiscrete, ParameterError

NEEDS = ("play", "feed", "sleep", "clean")
BOOST = 30
DECAY = 5
WRONG_PENALTY = 10
REWARD_SCALE = 2.75
REWARD_OFFSET = -200.0


def happiness(variables) -> float:
    """Deficit-weighted mean of the internal variables, in [0, 100].

    Lower variables weigh more: weight of variable i is proportional to
    ``101 - v_i``.
    """
    v = np.asarray(variables, dtype=float)
    w = 101.0 - v
    return float(np.dot(w, v) / w.sum())


def reward_from_variables(variables) -> float:
    """Linear map of happiness onto [-200, 75]."""
    return REWARD_SCALE * happiness(variables) + REWARD_OFFSET


def ideal_action(variables) -> int:
    return int(np.argmin(variables))


def utterance_probabilities(variables, tau: float, vocab_size: int) -> np.ndarray:
    """Token distribution: signal token j has logit (100 - v_j) / (100 tau), noise tokens 0."""
    logits = np.zeros(vocab_size)
    logits[: len(NEEDS)] = (100.0 - np.asarray(variables, dtype=float)) / (100.0 * tau)
    logits -= logits.max()
    p = np.exp(logits)
    return p / p.sum()


class Tamagotchi(Environment):
    """Four hidden needs; the agent sees HP plus ``max_msg_length`` tokens."""

    name = "tamagotchi"
    challenge = "State: Amount of signal"
    default_max_steps = 100
    reward_range = (-200.0, 75.0)

    def __init__(
        self,
        tau: float = 1.0,
        max_msg_length: int = 2,
        vocab_size: int = 6,
        max_steps: int | None = None,
        seed: int = 0,
    ):
        if tau <= 0:
            raise ParameterError(f"tau must be positive, got {tau}")
        if max_msg_length < 1:
            raise ParameterError("max_msg_length must be >= 1")
        if vocab_size < len(NEEDS):
            raise ParameterError(f"vocab_size must be >= {len(NEEDS)}")
        super().__init__(max_steps, seed)
        self.tau = float(tau)
        self.max_msg_length = int(max_msg_length)
        self.vocab_size = int(vocab_size)
        self.action_space = Discrete(len(NEEDS))
        self.observation_space = MultiDiscrete([101] + [self.vocab_size] * self.max_msg_length)
        self.variables = np.full(len(NEEDS), 100, dtype=int)
        self.utterance: tuple[int, ...] = ()

    @property
    def hp(self) -> int:
        # round half up so the value does not depend on numpy's banker's rounding
        return int(np.floor(self.variables.mean() + 0.5))

    def _speak(self) -> tuple[int, ...]:
        p = utterance_probabilities(self.variables, self.tau, self.vocab_size)
        tokens = self.rng.generator.choice(self.vocab_size, size=self.max_msg_length, p=p)
        self.utterance = tuple(int(t) for t in tokens)
        return self.utterance

    def _observe(self):
        return (self.hp, *self.utterance)

    def _reset(self):
        self.variables = np.full(len(NEEDS), 100, dtype=int)
        self._speak()
        return self._observe()

    def _transition(self, action: int):
        ideal = ideal_action(self.variables)
        delta = np.full(len(NEEDS), -DECAY)
        delta[action] = BOOST
        if action != ideal:
            delta -= WRONG_PENALTY
        self.variables = np.clip(self.variables + delta, 0, 100)
        reward = reward_from_variables(self.variables)
        self._speak()
        return self._observe(), reward, self.hp == 0, {"ideal": ideal}

    def render(self) -> str:
        words = " ".join(NEEDS[t] if t < len(NEEDS) else f"<{t}>" for t in self.utterance)
        return f"HP {self.hp:3d}  says: {words}"

    def key_map(self) -> dict[str, int]:
        return {"p": 0, "f": 1, "s": 2, "c": 3}
