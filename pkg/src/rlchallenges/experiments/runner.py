"""Run configured experiments and collect per-step learning curves."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from rlchallenges.agents import greedy_return, make_agent
from rlchallenges.core import ContractViolation, RLChallengeError
from rlchallenges.envs import make
from rlchallenges.experiments.config import ExperimentConfig, RunSpec


class BudgetExceeded(RLChallengeError, RuntimeError):
    """An agent tried to step past its environment-step budget."""


@dataclass
class EpisodeRow:
    repetition: int
    episode: int
    start_step: int  # 1-based index of the first step of the episode
    end_step: int
    ret: float
    status: str  # "terminated", "truncated" or "cut" (budget ran out or agent reset early)
    metrics: dict[str, float] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return self.status == "terminated"

    @property
    def finished(self) -> bool:
        """Ended by the environment rather than by the agent or the budget."""
        return self.status != "cut"


class Monitor:
    """Environment wrapper that logs rewards, episodes and step callbacks."""

    def __init__(self, env, budget: int, on_step=None):
        self.env = env
        self.budget = budget
        self.on_step = on_step
        self.step_count = 0
        self.rewards = np.zeros(budget)
        self.episode_of_step = np.zeros(budget, dtype=np.int64)
        self.episodes: list[tuple[int, int, float, str, dict]] = []
        self._start = None
        self._ret = 0.0

    def reset(self, seed=None):
        if self._start is not None and self._start <= self.step_count:
            # abandoned mid-episode (e.g. Go-Explore returning to a cell)
            self._close("cut", {})
        obs = self.env.reset(seed)
        self._start = self.step_count + 1
        self._ret = 0.0
        return obs

    def step(self, action):
        if self.step_count >= self.budget:
            raise BudgetExceeded(f"agent exceeded its budget of {self.budget} environment steps")
        out = self.env.step(action)
        i = self.step_count
        self.rewards[i] = out.reward
        self.episode_of_step[i] = len(self.episodes)
        self.step_count += 1
        self._ret += out.reward
        if out.done:
            metrics = {k: float(v) for k, v in out.info.items() if isinstance(v, (int, float, np.number))}
            self._close("terminated" if out.terminated else "truncated", metrics)
        if self.on_step is not None:
            self.on_step(self.step_count)
        return out

    def _close(self, status, metrics):
        self.episodes.append((self._start, self.step_count, self._ret, status, metrics))
        self._start = None

    def finish(self):
        if self._start is not None and self._start <= self.step_count:
            self._close("cut", {})

    def per_step_returns(self) -> np.ndarray:
        """Each step valued by the return of the episode it belongs to."""
        rets = np.array([e[2] for e in self.episodes] or [0.0])
        return rets[self.episode_of_step[: self.step_count]]

    @property
    def observation_space(self):
        return self.env.observation_space

    @property
    def action_space(self):
        return self.env.action_space

    @property
    def unwrapped(self):
        return getattr(self.env, "unwrapped", self.env)

    def __getattr__(self, name):
        if name == "env":
            raise AttributeError(name)
        return getattr(self.env, name)


@dataclass
class RepetitionResult:
    label: str
    repetition: int
    curve: np.ndarray
    episodes: list[EpisodeRow]
    model_calls_max: int | None = None


@dataclass
class RunRecord:
    """All repetitions of all runs of one experiment."""

    config: ExperimentConfig
    results: list[RepetitionResult]

    def curves(self, label: str) -> np.ndarray:
        """``(repetitions, total_steps)`` array of per-step returns."""
        rows = sorted((r for r in self.results if r.label == label), key=lambda r: r.repetition)
        if not rows:
            return np.zeros((0, self.config.total_steps))
        return np.vstack([r.curve for r in rows])

    def episodes(self, label: str, repetition: int | None = None) -> list[EpisodeRow]:
        out = []
        for r in sorted(self.results, key=lambda r: (r.label, r.repetition)):
            if r.label == label and (repetition is None or r.repetition == repetition):
                out.extend(r.episodes)
        return out

    def labels(self) -> list[str]:
        return [run.label for run in self.config.runs]

    def rows(self):
        """Yield ``(label, repetition, step, episode, return)`` sorted by repetition and step."""
        for r in sorted(self.results, key=lambda r: (self.labels().index(r.label), r.repetition)):
            ep_index = np.zeros(len(r.curve), dtype=np.int64)
            for i, e in enumerate(r.episodes):
                ep_index[e.start_step - 1 : e.end_step] = i
            for step, (value, ep) in enumerate(zip(r.curve, ep_index), start=1):
                yield r.label, r.repetition, step, int(ep), float(value)


def build(run: RunSpec, seed: int, planning_mode: str = "call-count"):
    env = make(run.env, framestack=run.framestack, seed=seed, **run.env_params)
    options = dict(run.options)
    if run.agent in ("dyna", "prioritized_sweeping"):
        options.setdefault("planning_mode", planning_mode)
    agent = make_agent(run.agent, env, run.learner_config(), seed=seed, **options)
    return env, agent


def run_repetition(cfg: ExperimentConfig, run: RunSpec, repetition: int) -> RepetitionResult:
    seed = cfg.base_seed + repetition
    env, agent = build(run, seed, cfg.planning_budget_mode)
    total = cfg.total_steps
    every = cfg.eval_every
    greedy_curve = np.zeros(total)
    state = {"calls": getattr(agent, "model_calls", None), "max_calls": 0, "value": 0.0}
    budget = agent.cfg.planning_budget
    check_calls = state["calls"] is not None and cfg.planning_budget_mode == "call-count"

    eval_env = None
    if every is not None:
        eval_env = make(run.env, framestack=run.framestack, seed=seed, **run.env_params)

    def on_step(step):
        if check_calls:
            calls = agent.model_calls
            used = calls - state["calls"]
            # planning for step t happens before step t+1 is taken
            if used > budget:
                raise ContractViolation(f"{used} model calls in one step exceed the budget of {budget}")
            state["max_calls"] = max(state["max_calls"], used)
            state["calls"] = calls
        if every is not None:
            if (step - 1) % every == 0:
                state["value"] = greedy_return(agent, eval_env, seed=seed)
            greedy_curve[step - 1] = state["value"]

    monitor = Monitor(env, total, on_step)
    if total > 0:
        agent.learn(monitor, total)
    monitor.finish()
    if check_calls:
        # planning that followed the final step
        used = agent.model_calls - state["calls"]
        if used > budget:
            raise ContractViolation(f"{used} model calls in one step exceed the budget of {budget}")
        state["max_calls"] = max(state["max_calls"], used)
    curve = greedy_curve if every is not None else monitor.per_step_returns()
    if len(curve) != total:
        raise ContractViolation(f"{run.agent} took {len(curve)} steps instead of {total}")
    episodes = [
        EpisodeRow(repetition, i, start, end, ret, status, metrics)
        for i, (start, end, ret, status, metrics) in enumerate(monitor.episodes)
    ]
    return RepetitionResult(run.label, repetition, curve, episodes, state["max_calls"] if check_calls else None)


def _job(args):
    cfg, run, rep = args
    return run_repetition(cfg, run, rep)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> RunRecord:
    """Run every (run, repetition) pair; deterministic for a given config.

    ``jobs > 1`` runs repetitions in worker processes; results are
    assembled in (run, repetition) order either way.
    """
    cfg.validate()
    tasks = [(cfg, run, rep) for run in cfg.runs for rep in range(cfg.repetitions)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_job, tasks))
    else:
        results = [_job(t) for t in tasks]
    return RunRecord(cfg, results)
