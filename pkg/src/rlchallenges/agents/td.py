"""One-step and n-step temporal-difference update rules.

Each update mutates the table in place and returns it for chaining.
"""

from __future__ import annotations

import math
from typing import Sequence

from rlchallenges.agents.table import ValueTable


def q_learning_update(q: ValueTable, s, a, r, s_next, terminated, alpha, gamma) -> ValueTable:
    target = r if terminated else r + gamma * q.max(s_next)
    row = q.row(s)
    row[a] += alpha * (target - row[a])
    return q


def sarsa_update(q: ValueTable, s, a, r, s_next, a_next, terminated, alpha, gamma) -> ValueTable:
    target = r if terminated else r + gamma * q.get(s_next, a_next)
    row = q.row(s)
    row[a] += alpha * (target - row[a])
    return q


def risk_sensitive_q_update(q: ValueTable, s, a, r, s_next, terminated, alpha, gamma, kappa) -> ValueTable:
    """Q-learning with asymmetric TD-error weights.

    Positive errors are scaled by ``1 - kappa`` and negative ones by
    ``1 + kappa``; ``kappa > 0`` is risk-averse.
    """
    target = r if terminated else r + gamma * q.max(s_next)
    row = q.row(s)
    delta = target - row[a]
    weight = (1.0 - kappa) if delta > 0 else (1.0 + kappa)
    row[a] += alpha * weight * delta
    return q


def count_bonus_reward(r: float, count: int, beta: float) -> float:
    """Novelty-augmented reward ``r + beta / sqrt(count)``.

    ``count`` is the visit count of the arrived-at state, already including
    the current visit.
    """
    if beta == 0.0:
        return r
    if count <= 0:
        raise ValueError("count must include the current visit")
    return r + beta / math.sqrt(count)


def nstep_targets(q: ValueTable, trajectory: Sequence[tuple], n: int | None, gamma: float, t: int) -> float:
    T = len(trajectory)
    horizon = T - t if n is None else min(n, T - t)
    g = 0.0
    for i in reversed(range(horizon)):
        g = trajectory[t + i][2] + gamma * g
    if n is not None and t + n < T:
        s_n, a_n, _ = trajectory[t + n]
        g += gamma**n * q.get(s_n, a_n)
    return g


def nstep_sarsa_episode_update(
    q: ValueTable,
    trajectory: Sequence[tuple],
    n: int | None,
    alpha: float,
    gamma: float,
    step_sizes: Sequence[float] | None = None,
) -> ValueTable:
    """Apply n-step SARSA backups for a finished episode, in time order.

    ``trajectory`` is ``[(s_0, a_0, r_0), ...]`` and ends at termination.
    ``n=None`` gives Monte Carlo targets. ``step_sizes`` optionally
    overrides ``alpha`` per time step.
    """
    for t in range(len(trajectory)):
        s, a, _ = trajectory[t]
        g = nstep_targets(q, trajectory, n, gamma, t)
        lr = alpha if step_sizes is None else step_sizes[t]
        row = q.row(s)
        row[a] += lr * (g - row[a])
    return q
