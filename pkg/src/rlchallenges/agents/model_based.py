"""Learned tabular models, Dyna, Prioritised Sweeping and value iteration."""

from __future__ import annotations

import heapq
import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from rlchallenges.agents.table import LearnerConfig, ValueTable
from rlchallenges.agents.td import q_learning_update
from rlchallenges.core import ModelError, RngStream


class TabularModel:
    """Maximum-likelihood transition/reward model built from observed transitions."""

    def __init__(self):
        self.visits: dict[tuple, int] = defaultdict(int)
        self.transitions: dict[tuple, dict[int, int]] = defaultdict(lambda: defaultdict(int))
        self.reward_sums: dict[tuple, float] = defaultdict(float)
        self.terminal_counts: dict[tuple, int] = defaultdict(int)
        self.predecessors: dict[int, set[tuple]] = defaultdict(set)
        self.calls = 0
        self._pairs: list[tuple] = []

    def update(self, s, a, r, s_next, terminated) -> None:
        sa = (s, a)
        if sa not in self.visits:
            self._pairs.append(sa)
        self.visits[sa] += 1
        self.transitions[sa][s_next] += 1
        self.reward_sums[(s, a, s_next)] += r
        if terminated:
            self.terminal_counts[(s, a, s_next)] += 1
        self.predecessors[s_next].add(sa)

    @property
    def visited_pairs(self) -> list[tuple]:
        return self._pairs

    def distribution(self, s, a) -> dict[int, float]:
        n = self.visits.get((s, a), 0)
        if n == 0:
            return {}
        return {s2: c / n for s2, c in self.transitions[(s, a)].items()}

    def mean_reward(self, s, a, s_next) -> float:
        return self.reward_sums[(s, a, s_next)] / self.transitions[(s, a)][s_next]

    def is_terminal(self, s, a, s_next) -> bool:
        # majority vote; exact for deterministic terminal transitions
        return 2 * self.terminal_counts.get((s, a, s_next), 0) > self.transitions[(s, a)][s_next]

    def sample(self, s, a, rng: RngStream) -> tuple[int, float, bool]:
        """Draw ``(s', r, terminated)`` from the ML estimate of a visited pair."""
        self.calls += 1
        counts = self.transitions[(s, a)]
        if len(counts) == 1:
            (s2,) = counts
        else:
            u = rng.random() * self.visits[(s, a)]
            acc = 0
            for s2, c in counts.items():
                acc += c
                if u < acc:
                    break
        return s2, self.mean_reward(s, a, s2), self.is_terminal(s, a, s2)

    def expected_target(self, q: ValueTable, s, a, gamma: float) -> float:
        """Expected one-step Q-learning target under the ML model."""
        self.calls += 1
        n = self.visits[(s, a)]
        total = 0.0
        for s2, c in self.transitions[(s, a)].items():
            boot = 0.0 if self.is_terminal(s, a, s2) else gamma * q.max(s2)
            total += c / n * (self.mean_reward(s, a, s2) + boot)
        return total

    def check_counts(self) -> bool:
        return all(sum(self.transitions[sa].values()) == n for sa, n in self.visits.items())


def dyna_learn_step(
    q: ValueTable,
    model: TabularModel,
    s,
    a,
    r,
    s_next,
    terminated,
    cfg: LearnerConfig,
    rng: RngStream,
    budget: int | None = None,
    deadline: float | None = None,
    clock=None,
) -> tuple[ValueTable, TabularModel]:
    """Dyna-Q: real update, model update, then simulated updates.

    Planning runs ``budget`` (default ``cfg.planning_budget``) simulated
    backups, or until ``clock() >= deadline`` when a deadline is given.
    """
    q_learning_update(q, s, a, r, s_next, terminated, cfg.alpha, cfg.gamma)
    model.update(s, a, r, s_next, terminated)
    pairs = model.visited_pairs
    n = cfg.planning_budget if budget is None else budget
    done = 0
    while (done < n) if deadline is None else (clock() < deadline):
        ps, pa = pairs[rng.integers(len(pairs))]
        s2, r2, t2 = model.sample(ps, pa, rng)
        q_learning_update(q, ps, pa, r2, s2, t2, cfg.alpha, cfg.gamma)
        done += 1
    return q, model


class PriorityQueue:
    """Max-priority queue over (s, a) pairs; pushing keeps the higher priority."""

    def __init__(self):
        self._heap: list = []
        self._best: dict[tuple, float] = {}
        self._tie = itertools.count()

    def push(self, item, priority: float) -> None:
        if priority <= self._best.get(item, float("-inf")):
            return
        self._best[item] = priority
        heapq.heappush(self._heap, (-priority, next(self._tie), item))

    def pop(self):
        while self._heap:
            neg, _, item = heapq.heappop(self._heap)
            if self._best.get(item) == -neg:
                del self._best[item]
                return item, -neg
        raise IndexError("pop from empty priority queue")

    def priority(self, item) -> float | None:
        return self._best.get(item)

    def __len__(self) -> int:
        return len(self._best)

    def __bool__(self) -> bool:
        return bool(self._best)


def prioritized_sweeping_step(
    q: ValueTable,
    model: TabularModel,
    pqueue: PriorityQueue,
    s,
    a,
    r,
    s_next,
    terminated,
    cfg: LearnerConfig,
    budget: int | None = None,
    deadline: float | None = None,
    clock=None,
) -> tuple[ValueTable, TabularModel, PriorityQueue]:
    """Prioritised Sweeping on one real transition.

    The real transition only updates the model and the queue; all value
    changes come from model-based backups popped in priority order.
    """
    model.update(s, a, r, s_next, terminated)
    target = r if terminated else r + cfg.gamma * q.max(s_next)
    priority = abs(target - q.get(s, a))
    if priority > cfg.theta:
        pqueue.push((s, a), priority)
    n = cfg.planning_budget if budget is None else budget
    done = 0
    while pqueue and ((done < n) if deadline is None else (clock() < deadline)):
        (ps, pa), _ = pqueue.pop()
        row = q.row(ps)
        row[pa] += cfg.alpha * (model.expected_target(q, ps, pa, cfg.gamma) - row[pa])
        done += 1
        v = q.max(ps)
        for bs, ba in model.predecessors.get(ps, ()):
            if model.is_terminal(bs, ba, ps):
                continue
            pred = model.mean_reward(bs, ba, ps) + cfg.gamma * v - q.get(bs, ba)
            if abs(pred) > cfg.theta:
                pqueue.push((bs, ba), abs(pred))
    return q, model, pqueue


@dataclass
class TabularMDP:
    """Exact descriptive model: ``transitions[(s, a)] = [(p, s', r, terminal), ...]``."""

    states: list[int]
    num_actions: int
    transitions: dict[tuple, list[tuple[float, int, float, bool]]] = field(default_factory=dict)
    terminal_states: frozenset[int] = frozenset()

    def check_normalized(self, tol: float = 1e-12) -> None:
        for sa, outcomes in self.transitions.items():
            total = sum(p for p, *_ in outcomes)
            if abs(total - 1.0) > tol or any(p < 0 for p, *_ in outcomes):
                raise ModelError(f"distribution for {sa} sums to {total!r}")


def value_iteration(mdp: TabularMDP, gamma: float, tol: float = 1e-9, max_iter: int = 100_000) -> ValueTable:
    """Synchronous value iteration; returns the greedy Q table of the fixed point."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    mdp.check_normalized()
    active = [s for s in mdp.states if s not in mdp.terminal_states]
    v = {s: 0.0 for s in mdp.states}

    def backup(s, a, values):
        total = 0.0
        for p, s2, r, term in mdp.transitions[(s, a)]:
            total += p * (r + (0.0 if term else gamma * values.get(s2, 0.0)))
        return total

    for _ in range(max_iter):
        new = dict(v)
        for s in active:
            new[s] = max(backup(s, a, v) for a in range(mdp.num_actions))
        change = max((abs(new[s] - v[s]) for s in active), default=0.0)
        v = new
        if change < tol:
            break
    else:
        raise ModelError("value iteration did not converge")
    q = ValueTable(mdp.num_actions)
    for s in active:
        for a in range(mdp.num_actions):
            q.set(s, a, backup(s, a, v))
    return q
