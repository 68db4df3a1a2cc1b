"""Agents that learn by interacting with an environment for a step budget.

Every agent exposes ``learn(env, total_steps)``, which performs exactly
``total_steps`` calls to ``env.step`` (ending mid-episode if needed), and
``greedy_action(obs)`` for evaluation rollouts.
"""

from __future__ import annotations

import time
from collections import defaultdict

import numpy as np

from rlchallenges.agents.exploration import GoExploreArchive, go_explore_step, replay
from rlchallenges.agents.model_based import (
    PriorityQueue,
    TabularMDP,
    TabularModel,
    dyna_learn_step,
    prioritized_sweeping_step,
    value_iteration,
)
from rlchallenges.agents.reinforce import (
    LinearGaussianPolicy,
    RunningMean,
    SoftmaxPolicy,
    default_features,
    reinforce_episode_update,
)
from rlchallenges.agents.table import LearnerConfig, ValueTable, epsilon_greedy, greedy_action
from rlchallenges.agents.td import (
    count_bonus_reward,
    nstep_sarsa_episode_update,
    q_learning_update,
    risk_sensitive_q_update,
    sarsa_update,
)
from rlchallenges.core import Box, ConfigError, Discrete, Discretizer, RngStream, state_key


class Agent:
    name = "agent"

    def __init__(self, env, config: LearnerConfig | None = None, seed: int = 0):
        self.cfg = config or LearnerConfig()
        self.rng = RngStream(seed).child(f"agent/{self.name}")
        self.steps = 0
        self.episodes = 0

    def learn(self, env, total_steps: int) -> None:
        while self.steps < total_steps:
            self.run_episode(env, total_steps)
            self.episodes += 1

    def run_episode(self, env, limit: int) -> None:
        raise NotImplementedError

    def greedy_action(self, obs):
        raise NotImplementedError


class TabularAgent(Agent):
    """Shared plumbing for value-table agents on countable (or binned) states."""

    def __init__(self, env, config=None, seed=0, obs_bins: int | None = None):
        super().__init__(env, config, seed)
        if not isinstance(env.action_space, Discrete):
            raise ConfigError(f"{self.name} needs a discrete action space, got {env.action_space!r}")
        self.space = env.observation_space
        self.discretizer = None
        if isinstance(self.space, Box):
            if obs_bins is None:
                raise ConfigError(f"{self.name} on a continuous observation space needs obs_bins")
            self.discretizer = Discretizer.for_space(self.space, obs_bins)
        self.q = ValueTable(env.action_space.n, self.cfg.q0)
        self.sa_visits: dict[tuple, int] = defaultdict(int)

    def key(self, obs) -> int:
        return state_key(obs, self.space, self.discretizer)

    def step_size(self, s, a) -> float:
        if self.cfg.alpha_schedule == "visits":
            self.sa_visits[(s, a)] += 1
            return 1.0 / self.sa_visits[(s, a)]
        return self.cfg.alpha

    def choose(self, s) -> int:
        return epsilon_greedy(self.q, s, self.cfg.epsilon, self.rng)

    def greedy_action(self, obs) -> int:
        return greedy_action(self.q, self.key(obs), self.rng)


class QLearning(TabularAgent):
    name = "q_learning"

    def update(self, s, a, r, s2, terminated) -> None:
        q_learning_update(self.q, s, a, r, s2, terminated, self.step_size(s, a), self.cfg.gamma)

    def run_episode(self, env, limit):
        s = self.key(env.reset())
        while self.steps < limit:
            a = self.choose(s)
            out = env.step(a)
            self.steps += 1
            s2 = self.key(out.observation)
            self.update(s, a, out.reward, s2, out.terminated)
            s = s2
            if out.done:
                break


class Sarsa(TabularAgent):
    name = "sarsa"

    def run_episode(self, env, limit):
        s = self.key(env.reset())
        a = self.choose(s)
        while self.steps < limit:
            out = env.step(a)
            self.steps += 1
            s2 = self.key(out.observation)
            a2 = self.choose(s2)
            sarsa_update(self.q, s, a, out.reward, s2, a2, out.terminated, self.step_size(s, a), self.cfg.gamma)
            s, a = s2, a2
            if out.done:
                break


class NStepSarsa(TabularAgent):
    """n-step SARSA with backups applied once the episode has finished."""

    name = "nstep_sarsa"

    def run_episode(self, env, limit):
        s = self.key(env.reset())
        trajectory = []
        finished = False
        while self.steps < limit:
            a = self.choose(s)
            out = env.step(a)
            self.steps += 1
            trajectory.append((s, a, out.reward))
            s = self.key(out.observation)
            if out.done:
                finished = True
                break
        if finished:
            sizes = [self.step_size(st, at) for st, at, _ in trajectory]
            nstep_sarsa_episode_update(self.q, trajectory, self.cfg.n, self.cfg.alpha, self.cfg.gamma, sizes)


class CountBonusQ(QLearning):
    """Q-learning on ``r + beta / sqrt(N(s'))`` with arrived-state counts."""

    name = "count_bonus"

    def __init__(self, env, config=None, seed=0, obs_bins=None):
        super().__init__(env, config, seed, obs_bins)
        self.state_counts: dict[int, int] = defaultdict(int)

    def update(self, s, a, r, s2, terminated):
        self.state_counts[s2] += 1
        bonus_r = count_bonus_reward(r, self.state_counts[s2], self.cfg.beta)
        q_learning_update(self.q, s, a, bonus_r, s2, terminated, self.step_size(s, a), self.cfg.gamma)


class RiskSensitiveQ(QLearning):
    name = "risk_q"

    def update(self, s, a, r, s2, terminated):
        risk_sensitive_q_update(
            self.q, s, a, r, s2, terminated, self.step_size(s, a), self.cfg.gamma, self.cfg.kappa
        )


class _Planner(QLearning):
    """Base for Dyna and Prioritised Sweeping.

    In ``call-count`` mode each real step gets ``planning_budget`` model
    calls. In ``wall-clock`` mode planning continues until the environment
    accepts the next step (``env.next_step_available_at()``).
    """

    def __init__(self, env, config=None, seed=0, obs_bins=None, planning_mode: str = "call-count"):
        super().__init__(env, config, seed, obs_bins)
        if planning_mode not in ("call-count", "wall-clock"):
            raise ConfigError(f"planning_mode must be 'call-count' or 'wall-clock', got {planning_mode!r}")
        if planning_mode == "wall-clock" and not hasattr(env, "next_step_available_at"):
            raise ConfigError(f"wall-clock planning needs an environment with a step timeout, not {env!r}")
        self.planning_mode = planning_mode
        self.model = TabularModel()
        self._env = env

    @property
    def model_calls(self) -> int:
        return self.model.calls

    def _limits(self):
        if self.planning_mode == "wall-clock":
            return {"deadline": self._env.next_step_available_at(), "clock": time.monotonic}
        return {}


class DynaQ(_Planner):
    name = "dyna"

    def __init__(self, env, config=None, seed=0, obs_bins=None, planning_mode="call-count"):
        super().__init__(env, config, seed, obs_bins, planning_mode)
        self.plan_rng = self.rng.child("planning")

    def update(self, s, a, r, s2, terminated):
        dyna_learn_step(self.q, self.model, s, a, r, s2, terminated, self.cfg, self.plan_rng, **self._limits())


class PrioritizedSweeping(_Planner):
    name = "prioritized_sweeping"

    def __init__(self, env, config=None, seed=0, obs_bins=None, planning_mode="call-count"):
        super().__init__(env, config, seed, obs_bins, planning_mode)
        self.queue = PriorityQueue()

    def update(self, s, a, r, s2, terminated):
        prioritized_sweeping_step(self.q, self.model, self.queue, s, a, r, s2, terminated, self.cfg, **self._limits())


def descriptive_mdp(env) -> TabularMDP:
    """Exact model of an environment exposing ``model`` and ``valid_states``."""
    if not hasattr(env, "model") or not hasattr(env, "valid_states"):
        raise ConfigError(f"{env!r} does not expose a descriptive model")
    states = env.valid_states()
    terminal = frozenset(s for s in states if env.is_terminal_state(s))
    n = env.action_space.n
    transitions = {}
    for s in states:
        if s in terminal:
            continue
        for a in range(n):
            pred = env.model(s, a, "descriptive")
            transitions[(s, a)] = [
                (float(p), int(s2), pred.reward, bool(t))
                for p, s2, t in zip(pred.probabilities, pred.next_states, pred.terminated)
            ]
    return TabularMDP(states, n, transitions, terminal)


class ValueIterationAgent(TabularAgent):
    """Plans once with the environment's exact model, then acts greedily."""

    name = "value_iteration"

    def __init__(self, env, config=None, seed=0, obs_bins=None, tol: float = 1e-9):
        super().__init__(env, config, seed, obs_bins)
        gamma = self.cfg.gamma
        self.q = value_iteration(descriptive_mdp(getattr(env, "unwrapped", env)), gamma, tol)

    def run_episode(self, env, limit):
        s = self.key(env.reset())
        while self.steps < limit:
            out = env.step(self.choose(s))
            self.steps += 1
            s = self.key(out.observation)
            if out.done:
                break


class GoExplore(Agent):
    """Return-then-explore; once a rewarding terminal cell is archived the
    agent exploits by replaying its action sequence."""

    name = "go_explore"

    def __init__(self, env, config=None, seed=0, explore_steps: int = 3):
        super().__init__(env, config, seed)
        if not getattr(getattr(env, "unwrapped", env), "deterministic", False):
            raise ConfigError("go_explore needs a deterministic environment")
        self.explore_steps = int(explore_steps)
        self.archive = GoExploreArchive()

    def learn(self, env, total_steps):
        archive = self.archive
        archive.env_steps = self.steps
        while archive.env_steps < total_steps and archive.best_goal() is None:
            go_explore_step(archive, env, self.rng, self.explore_steps, total_steps)
        self.steps = archive.env_steps
        goal = archive.best_goal()
        while goal is not None and self.steps < total_steps:
            env.reset()
            for a in goal.actions:
                if self.steps >= total_steps:
                    break
                env.step(a)
                self.steps += 1
            self.episodes += 1
        archive.env_steps = self.steps

    def greedy_action(self, obs):
        raise NotImplementedError("go_explore acts open-loop; use greedy_return")

    def greedy_return(self, env) -> float:
        goal = self.archive.best_goal()
        if goal is None:
            return 0.0
        _, total, _ = replay(env, goal.actions)
        return total


class Reinforce(Agent):
    """Monte Carlo policy gradient with a running-mean baseline."""

    name = "reinforce"

    def __init__(self, env, config=None, seed=0, lr: float = 0.01, init_std: float = 0.3):
        super().__init__(env, config, seed)
        self.features = default_features(env)
        space = env.action_space
        if isinstance(space, Box):
            self.policy = LinearGaussianPolicy(self.features.dim, space.low, space.high, lr, init_std)
        elif isinstance(space, Discrete):
            self.policy = SoftmaxPolicy(self.features.dim, space.n, lr)
        else:
            raise ConfigError(f"reinforce does not support {space!r}")
        self.baseline = RunningMean()

    def run_episode(self, env, limit):
        obs = env.reset()
        trajectory = []
        finished = False
        while self.steps < limit:
            phi = self.features(obs)
            raw, action = self.policy.sample(phi, self.rng)
            out = env.step(action)
            self.steps += 1
            trajectory.append((phi, raw, out.reward))
            obs = out.observation
            if out.done:
                finished = True
                break
        if finished:
            reinforce_episode_update(self.policy, trajectory, self.cfg.gamma, self.baseline)

    def greedy_action(self, obs):
        return self.policy.greedy(self.features(obs))


AGENTS = {
    cls.name: cls
    for cls in (
        QLearning,
        Sarsa,
        NStepSarsa,
        CountBonusQ,
        GoExplore,
        RiskSensitiveQ,
        DynaQ,
        PrioritizedSweeping,
        ValueIterationAgent,
        Reinforce,
    )
}


def make_agent(name: str, env, config: LearnerConfig | None = None, seed: int = 0, **options) -> Agent:
    try:
        cls = AGENTS[name]
    except KeyError:
        raise ConfigError(f"unknown agent {name!r}; available: {', '.join(AGENTS)}") from None
    try:
        return cls(env, config, seed, **options)
    except TypeError as exc:
        raise ConfigError(f"bad options for agent {name!r}: {exc}") from None


def _has_tie(agent, obs) -> bool:
    q = getattr(agent, "q", None)
    return q is not None and len(q.greedy_actions(agent.key(obs))) > 1


def greedy_return(agent: Agent, env, seed: int | None = None, max_steps: int | None = None) -> float:
    """Undiscounted return of one greedy rollout (no learning)."""
    if hasattr(agent, "greedy_return"):
        return agent.greedy_return(env)
    obs = env.reset(seed)
    total = 0.0
    limit = max_steps or env.max_steps
    # a deterministic env revisiting an observation with nothing earned in
    # between is stuck in a zero-reward loop until truncation, as long as no
    # random tie-break along the loop could leave it
    seen = {} if getattr(env, "deterministic", False) else None
    for _ in range(limit):
        if seen is not None:
            key = np.asarray(obs).tobytes()
            if seen.get(key) == total:
                break
            if _has_tie(agent, obs):
                seen.clear()
            else:
                seen[key] = total
        out = env.step(agent.greedy_action(obs))
        total += out.reward
        obs = out.observation
        if out.done:
            break
    return total


def greedy_rollout(agent: Agent, env, seed: int | None = None) -> list:
    """Step outcomes of one greedy rollout, for inspecting where it ends."""
    obs = env.reset(seed)
    outcomes = []
    while True:
        out = env.step(agent.greedy_action(obs))
        outcomes.append(out)
        obs = out.observation
        if out.done:
            return outcomes


__all__ = [
    "AGENTS",
    "Agent",
    "CountBonusQ",
    "DynaQ",
    "GoExplore",
    "NStepSarsa",
    "PrioritizedSweeping",
    "QLearning",
    "Reinforce",
    "RiskSensitiveQ",
    "Sarsa",
    "TabularAgent",
    "ValueIterationAgent",
    "descriptive_mdp",
    "greedy_return",
    "greedy_rollout",
    "make_agent",
]
