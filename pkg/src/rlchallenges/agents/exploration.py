"""Go-Explore for deterministic environments: archive cells, return, explore."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from rlchallenges.core import ContractViolation, RngStream, state_key


@dataclass
class ArchiveEntry:
    actions: list
    visits: int = 0
    reward: float = 0.0
    terminal: bool = False


@dataclass
class GoExploreArchive:
    """Cells keyed by state key, each holding the best known way to reach it.

    ``visits`` counts how often a cell has been reached, during replays as
    well as exploration; selection weight is ``1 / sqrt(visits + 1)``.
    """

    cells: dict[int, ArchiveEntry] = field(default_factory=dict)
    env_steps: int = 0
    iterations: int = 0

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, key) -> bool:
        return key in self.cells

    def offer(self, key, actions: list, reward: float, terminal: bool) -> bool:
        """Archive ``key`` or improve it (higher reward, then shorter sequence)."""
        entry = self.cells.get(key)
        if entry is None:
            self.cells[key] = ArchiveEntry(list(actions), 1, reward, terminal)
            return True
        entry.visits += 1
        if reward > entry.reward or (reward == entry.reward and len(actions) < len(entry.actions)):
            entry.actions, entry.reward, entry.terminal = list(actions), reward, terminal
            return True
        return False

    def selectable(self) -> list[int]:
        return [k for k, e in self.cells.items() if not e.terminal]

    def select(self, rng: RngStream):
        keys = self.selectable()
        if not keys:
            return None
        weights = [1.0 / math.sqrt(self.cells[k].visits + 1) for k in keys]
        u = rng.random() * sum(weights)
        acc = 0.0
        for k, w in zip(keys, weights):
            acc += w
            if u < acc:
                return k
        return keys[-1]

    def best_goal(self) -> ArchiveEntry | None:
        """Highest-reward terminal cell with positive reward, if any."""
        goals = [e for e in self.cells.values() if e.terminal and e.reward > 0]
        return max(goals, key=lambda e: (e.reward, -len(e.actions)), default=None)


def replay(env, actions, expected_key=None):
    """Reset ``env`` and replay ``actions``; returns ``(obs, reward, outcome)``.

    Raises ContractViolation when the replay ends somewhere other than
    ``expected_key`` or the episode ends early.
    """
    obs = env.reset()
    total = 0.0
    out = None
    for i, a in enumerate(actions):
        if out is not None and out.done:
            raise ContractViolation(f"replay ended early after {i} of {len(actions)} actions")
        out = env.step(a)
        obs = out.observation
        total += out.reward
    if expected_key is not None and state_key(obs, env.observation_space) != expected_key:
        raise ContractViolation(
            f"replay reached state {state_key(obs, env.observation_space)} instead of {expected_key}; "
            "is the environment deterministic?"
        )
    return obs, total, out


def go_explore_step(
    archive: GoExploreArchive,
    env,
    rng: RngStream,
    explore_steps: int,
    max_env_steps: int | None = None,
) -> GoExploreArchive:
    """One select-return-explore iteration.

    Every environment step, including the replay, counts towards
    ``archive.env_steps``; the iteration stops early once ``max_env_steps``
    is reached.
    """
    space = env.observation_space
    budget = float("inf") if max_env_steps is None else max_env_steps

    def room():
        return archive.env_steps < budget

    archive.iterations += 1
    if not archive.cells:
        obs = env.reset()
        archive.offer(state_key(obs, space), [], 0.0, False)
        return archive
    key = archive.select(rng)
    if key is None or not room():
        return archive
    target = archive.cells[key]
    actions = list(target.actions)
    # return phase, counted step by step and crediting every cell passed
    obs = env.reset()
    total = 0.0
    out = None
    for i, a in enumerate(actions):
        if not room():
            return archive
        out = env.step(a)
        archive.env_steps += 1
        total += out.reward
        obs = out.observation
        passed = archive.cells.get(state_key(obs, space))
        if passed is not None:
            passed.visits += 1
        if out.done and i < len(actions) - 1:
            raise ContractViolation("replay ended before the archived sequence was exhausted")
    if state_key(obs, space) != key:
        raise ContractViolation(
            f"replay reached state {state_key(obs, space)} instead of {key}; is the environment deterministic?"
        )
    # explore phase
    for _ in range(explore_steps):
        if not room() or (out is not None and out.done):
            break
        a = env.action_space.sample(rng)
        out = env.step(a)
        archive.env_steps += 1
        actions.append(a)
        total += out.reward
        archive.offer(state_key(out.observation, space), actions, total, out.terminated)
    return archive
