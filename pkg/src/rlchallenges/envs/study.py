"""Study: decide each day how to prepare for an exam at the end of term."""

from __future__ import annotations

import numpy as np

from rlchallenges.core import Discrete, Environment, MultiDiscrete, ParameterError

STUDY, SLEEP, GO_OUT = 0, 1, 2
MAX_LEVEL = 4
EXAM_REWARD = 10.0


class Study(Environment):
    """Knowledge/energy/day MDP with noisy per-action rewards.

    The action taken at day counter ``t`` happens on calendar day ``t + 1``;
    the last action (``t = total_days - 1``) falls on the exam day. Lecture
    days are spread evenly over days ``1 .. total_days - 1``.
    """

    name = "study"
    challenge = "Credit assignment: Depth"

    def __init__(
        self,
        num_other_actions: int = 3,
        reward_noise_mean: float = 1.0,
        reward_noise_sigma: float = 1.0,
        total_days: int = 10,
        lecture_days: int = 4,
        lectures_needed: int = 3,
        energy_needed: int = 2,
        max_steps: int | None = None,
        seed: int = 0,
    ):
        if num_other_actions < 0 or reward_noise_mean < 0 or reward_noise_sigma < 0:
            raise ParameterError("action count and noise parameters must be non-negative")
        if total_days < 2:
            raise ParameterError("total_days must be >= 2")
        if not 0 <= lectures_needed <= lecture_days <= total_days - 1:
            raise ParameterError("need lectures_needed <= lecture_days <= total_days - 1")
        if not 0 <= energy_needed < MAX_LEVEL:
            raise ParameterError(f"energy_needed must lie in [0, {MAX_LEVEL - 1}]")
        super().__init__(total_days if max_steps is None else max_steps, seed)
        self.num_other_actions = int(num_other_actions)
        self.sigma = float(reward_noise_sigma)
        self.total_days = int(total_days)
        self.lectures_needed = int(lectures_needed)
        self.energy_needed = int(energy_needed)
        n_actions = 3 + self.num_other_actions
        self.action_space = Discrete(n_actions)
        self.observation_space = MultiDiscrete([MAX_LEVEL + 1, MAX_LEVEL + 1, self.total_days + 1])
        self.action_means = -reward_noise_mean * self.layout_rng.generator.random(n_actions)
        if lecture_days:
            days = np.rint(np.linspace(1, self.total_days - 1, lecture_days)).astype(int)
            self.lecture_schedule = frozenset(int(d) for d in days)
        else:
            self.lecture_schedule = frozenset()
        if len(self.lecture_schedule) != lecture_days:
            raise ParameterError("too many lecture days to space them evenly")
        self.k = self.e = self.t = 0

    def action_names(self) -> list[str]:
        return ["study", "sleep", "go_out"] + [f"other_{i + 1}" for i in range(self.num_other_actions)]

    def _reset(self):
        self.k = self.e = self.t = 0
        return (0, 0, 0)

    def _transition(self, action: int):
        day = self.t + 1
        if action == STUDY and day in self.lecture_schedule:
            self.k = min(self.k + 1, MAX_LEVEL)
        elif action == SLEEP:
            self.e = min(self.e + 1, MAX_LEVEL)
        elif action == GO_OUT:
            self.e = max(self.e - 1, 0)
        self.t += 1
        reward = self.action_means[action]
        if self.sigma > 0:
            reward += self.rng.normal(0.0, self.sigma)
        passed = False
        if self.t == self.total_days and action == STUDY:
            passed = self.k >= self.lectures_needed and self.e > self.energy_needed
            if passed:
                reward += EXAM_REWARD
        done = self.t == self.total_days
        return (self.k, self.e, self.t), float(reward), done, {"passed": passed} if done else {}

    def render(self) -> str:
        cal = "".join(
            "E" if d == self.total_days else ("L" if d in self.lecture_schedule else ".")
            for d in range(1, self.total_days + 1)
        )
        cursor = " " * self.t + "^"
        return f"days {cal}\n     {cursor}\nknowledge={self.k} energy={self.e} day={self.t}"

    def key_map(self) -> dict[str, int]:
        return {str(i): i for i in range(min(self.action_space.n, 10))}
