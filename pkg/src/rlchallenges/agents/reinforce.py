"""REINFORCE with linear Gaussian (continuous) or softmax (discrete) policies."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from rlchallenges.core import Box, Discrete, MultiDiscrete, RngStream, state_key

log = logging.getLogger(__name__)

MIN_STD = 1e-6
LOG_MIN_STD = math.log(MIN_STD)


@dataclass
class RunningMean:
    """Baseline: running mean of all returns seen so far."""

    value: float = 0.0
    count: int = 0

    def update(self, x: float) -> None:
        self.count += 1
        self.value += (x - self.value) / self.count


class LinearGaussianPolicy:
    """Diagonal Gaussian with mean ``features @ weights`` and state-free log-std."""

    def __init__(self, num_features: int, action_low, action_high, lr: float = 0.01, init_std: float = 0.3):
        self.low = np.asarray(action_low, dtype=float)
        self.high = np.asarray(action_high, dtype=float)
        dim = self.low.size
        self.weights = np.zeros((num_features, dim))
        self.log_std = np.full(dim, math.log(init_std))
        self.lr = float(lr)
        self.clamp_events = 0

    @property
    def std(self) -> np.ndarray:
        return np.exp(self.log_std)

    def mean(self, phi) -> np.ndarray:
        return np.asarray(phi) @ self.weights

    def sample(self, phi, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
        """Returns ``(raw, clipped)``; gradients use the raw draw."""
        raw = self.mean(phi) + self.std * rng.generator.standard_normal(self.low.size)
        return raw, np.clip(raw, self.low, self.high)

    def greedy(self, phi) -> np.ndarray:
        return np.clip(self.mean(phi), self.low, self.high)

    def log_prob(self, phi, action) -> float:
        z = (np.asarray(action) - self.mean(phi)) / self.std
        return float(np.sum(-0.5 * z**2 - self.log_std - 0.5 * math.log(2 * math.pi)))

    def grad_log_prob(self, phi, action) -> dict[str, np.ndarray]:
        phi = np.asarray(phi, dtype=float)
        var = self.std**2
        diff = np.asarray(action) - self.mean(phi)
        return {
            "weights": np.outer(phi, diff / var),
            "log_std": diff**2 / var - 1.0,
        }

    def params(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights, "log_std": self.log_std}

    def apply(self, grads: dict[str, np.ndarray], scale: float) -> None:
        self.weights += scale * grads["weights"]
        self.log_std += scale * grads["log_std"]
        if np.any(self.log_std < LOG_MIN_STD):
            self.clamp_events += 1
            log.warning("policy std fell below %g and was clamped", MIN_STD)
            np.maximum(self.log_std, LOG_MIN_STD, out=self.log_std)


class SoftmaxPolicy:
    """Linear softmax over a discrete action set."""

    def __init__(self, num_features: int, num_actions: int, lr: float = 0.01):
        self.weights = np.zeros((num_features, num_actions))
        self.lr = float(lr)

    def probabilities(self, phi) -> np.ndarray:
        logits = np.asarray(phi) @ self.weights
        logits = logits - logits.max()
        p = np.exp(logits)
        return p / p.sum()

    def sample(self, phi, rng: RngStream) -> tuple[int, int]:
        p = self.probabilities(phi)
        a = int(np.searchsorted(np.cumsum(p), rng.random() * p.sum(), side="right"))
        a = min(a, p.size - 1)
        return a, a

    def greedy(self, phi) -> int:
        return int(np.argmax(self.probabilities(phi)))

    def log_prob(self, phi, action) -> float:
        logits = np.asarray(phi) @ self.weights
        m = logits.max()
        return float(logits[action] - m - math.log(np.exp(logits - m).sum()))

    def grad_log_prob(self, phi, action) -> dict[str, np.ndarray]:
        onehot = np.zeros(self.weights.shape[1])
        onehot[action] = 1.0
        return {"weights": np.outer(phi, onehot - self.probabilities(phi))}

    def params(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights}

    def apply(self, grads: dict[str, np.ndarray], scale: float) -> None:
        self.weights += scale * grads["weights"]


def reinforce_episode_update(policy, trajectory, gamma: float, baseline: RunningMean):
    """Monte Carlo policy-gradient update from one finished episode.

    ``trajectory`` is ``[(features, action, reward), ...]`` where ``action``
    is the raw (pre-clipping) sample. Gradients are taken at the
    pre-update parameters; the baseline then absorbs the episode's returns.
    """
    if not trajectory:
        return policy
    returns = np.empty(len(trajectory))
    g = 0.0
    for t in range(len(trajectory) - 1, -1, -1):
        g = trajectory[t][2] + gamma * g
        returns[t] = g
    total = {k: np.zeros_like(v) for k, v in policy.params().items()}
    b = baseline.value
    for (phi, action, _), g_t in zip(trajectory, returns):
        adv = g_t - b
        if adv == 0.0:
            continue
        for k, v in policy.grad_log_prob(phi, action).items():
            total[k] += adv * v
    policy.apply(total, policy.lr)
    for g_t in returns:
        baseline.update(float(g_t))
    return policy


# -- feature maps ------------------------------------------------------------


@dataclass
class FeatureMap:
    dim: int
    fn: object = field(repr=False)

    def __call__(self, obs) -> np.ndarray:
        return self.fn(obs)


def trashbot_features(obs) -> np.ndarray:
    """Observation, sin/cos of both joint angles and a bias, all in [-1, 1]."""
    o = np.asarray(obs, dtype=float)
    c1, s1 = o[0], o[1]
    ex, ey = o[2] - o[0], o[3] - o[1]
    # relative angle of the second link
    c2, s2 = c1 * ex + s1 * ey, c1 * ey - s1 * ex
    return np.concatenate([o[:6] / 2.0, o[6:7], [s1, c1, s2, c2, 1.0]])


def default_features(env) -> FeatureMap:
    space = env.observation_space
    if getattr(env, "name", "") == "trashbot":
        return FeatureMap(12, trashbot_features)
    if isinstance(space, Box):
        low, high = space.low.ravel(), space.high.ravel()
        span = np.where(high > low, high - low, 1.0)

        def scaled(obs):
            x = 2.0 * (np.asarray(obs, dtype=float).ravel() - low) / span - 1.0
            return np.append(x, 1.0)

        return FeatureMap(low.size + 1, scaled)
    if isinstance(space, (Discrete, MultiDiscrete)):
        size = space.size

        def onehot(obs):
            v = np.zeros(size)
            v[state_key(obs, space)] = 1.0
            return v

        return FeatureMap(size, onehot)
    raise TypeError(f"no default features for {space!r}")
