"""Frozen experiment presets, one per challenge comparison.

Hyperparameters were tuned once so the qualitative orderings show up at
desk scale; they are regression constants now, change them only together
with the golden CSVs in ``tests/golden``.
"""

from __future__ import annotations

from rlchallenges.core import ConfigError
from rlchallenges.experiments.config import ExperimentConfig, RunSpec


def _fig2_boulder() -> ExperimentConfig:
    # optimistic q0 lets epsilon-greedy find the top at H=10 within budget
    base = dict(alpha=0.1, gamma=0.9, epsilon=0.1, q0=0.1)
    runs = []
    for h in (10, 30, 100):
        env = {"height": h, "num_grips": 3}
        runs += [
            RunSpec(f"eps-greedy H={h}", "boulder", "q_learning", env, learner=dict(base)),
            RunSpec(f"count-bonus H={h}", "boulder", "count_bonus", env, learner=dict(base, beta=0.01)),
            RunSpec(f"go-explore H={h}", "boulder", "go_explore", env, options={"explore_steps": 3}),
        ]
    return ExperimentConfig("fig2-boulder", runs, total_steps=20_000, repetitions=10, log_interval=100)


def _fig3_memory() -> ExperimentConfig:
    learner = dict(alpha=0.2, gamma=1.0, epsilon=0.02)
    runs = [
        RunSpec(f"framestack k={k}", "memory_corridor", "q_learning", {"num_doors": 3}, framestack=k, learner=learner)
        for k in (1, 2, 4, 8)
    ]
    return ExperimentConfig(
        "fig3-memory", runs, total_steps=50_000, repetitions=10, smoothing_window=500, log_interval=500
    )


def _fig3_supermarket() -> ExperimentConfig:
    learner = dict(alpha=0.5, gamma=1.0, epsilon=0.1)
    env = {"noise": 0.0}
    runs = [
        RunSpec("q-learning", "supermarket", "q_learning", env, learner=learner),
        RunSpec("dyna", "supermarket", "dyna", env, learner=dict(learner, planning_budget=5)),
        RunSpec("prioritized-sweeping", "supermarket", "prioritized_sweeping", env, learner=dict(learner, planning_budget=5)),
    ]
    return ExperimentConfig(
        "fig3-supermarket", runs, total_steps=20_000, repetitions=10, smoothing_window=200, log_interval=100
    )


def _roadrunner_onoff() -> ExperimentConfig:
    learner = dict(alpha=0.1, gamma=1.0, epsilon=0.2)
    # max_speed 4 makes the fastest line pass states where one exploratory
    # acceleration goes over the edge
    env = {"width": 10, "max_speed": 4}
    runs = [
        RunSpec("q-learning", "roadrunner", "q_learning", env, learner=learner),
        RunSpec("sarsa", "roadrunner", "sarsa", env, learner=learner),
    ]
    return ExperimentConfig(
        "roadrunner-onoff", runs, total_steps=50_000, repetitions=10, smoothing_window=500, log_interval=250
    )


def _study_nstep() -> ExperimentConfig:
    learner = dict(alpha=0.1, gamma=1.0, epsilon=0.05, q0=2.0)
    env = {"reward_noise_sigma": 2.0, "num_other_actions": 5, "lectures_needed": 2, "energy_needed": 1}
    runs = [
        RunSpec("n=1", "study", "nstep_sarsa", env, learner=dict(learner, n=1)),
        RunSpec("monte-carlo", "study", "nstep_sarsa", env, learner=dict(learner, n=None)),
    ]
    return ExperimentConfig(
        "study-nstep", runs, total_steps=30_000, repetitions=10, smoothing_window=1000, log_interval=100
    )


def _golf_risk() -> ExperimentConfig:
    learner = dict(alpha=0.1, gamma=1.0, epsilon=0.1)
    env = {"stochasticity_level": 0.05, "width": 15, "length": 20}
    runs = [
        RunSpec("q-learning", "golf", "q_learning", env, learner=learner),
        RunSpec("risk-averse kappa=0.5", "golf", "risk_q", env, learner=dict(learner, kappa=0.5)),
        RunSpec("risk-seeking kappa=-0.5", "golf", "risk_q", env, learner=dict(learner, kappa=-0.5)),
    ]
    return ExperimentConfig("golf-risk", runs, total_steps=20_000, repetitions=10, smoothing_window=200, log_interval=100)


def _catch_dim() -> ExperimentConfig:
    learner = dict(alpha=0.1, gamma=1.0, epsilon=0.1)
    runs = [
        RunSpec(f"{n}x{n}", "catch", "q_learning", {"rows": n, "columns": n, "observation_type": "vectorised"}, learner=learner)
        for n in (5, 7, 10)
    ]
    return ExperimentConfig("catch-dim", runs, total_steps=20_000, repetitions=10, smoothing_window=200, log_interval=100)


def _tamagotchi_signal() -> ExperimentConfig:
    learner = dict(alpha=0.1, gamma=0.9, epsilon=0.1)
    runs = [
        RunSpec(f"tau={tau}", "tamagotchi", "q_learning", {"tau": tau, "max_msg_length": 2}, learner=learner)
        for tau in (0.05, 50.0)
    ]
    return ExperimentConfig(
        "tamagotchi-signal", runs, total_steps=20_000, repetitions=10, smoothing_window=200, log_interval=100
    )


def _trashbot_bins() -> ExperimentConfig:
    q = dict(alpha=0.1, gamma=0.99, epsilon=0.1)
    runs = [
        RunSpec(
            f"discrete bins={b}",
            "trashbot",
            "q_learning",
            {"action_mode": "discrete", "num_bins": b},
            learner=q,
            options={"obs_bins": 8},
        )
        for b in (3, 5)
    ]
    # a small step size keeps the policy exploratory; larger ones learn to
    # park the arm away from every obstacle before any drop is seen
    runs.append(
        RunSpec(
            "continuous reinforce",
            "trashbot",
            "reinforce",
            {"action_mode": "continuous"},
            learner={"gamma": 1.0},
            options={"lr": 1e-4, "init_std": 0.45},
        )
    )
    return ExperimentConfig(
        "trashbot-bins", runs, total_steps=100_000, repetitions=5, smoothing_window=2000, log_interval=1000
    )


PRESETS = {
    "fig2-boulder": _fig2_boulder,
    "fig3-memory": _fig3_memory,
    "fig3-supermarket": _fig3_supermarket,
    "roadrunner-onoff": _roadrunner_onoff,
    "study-nstep": _study_nstep,
    "golf-risk": _golf_risk,
    "catch-dim": _catch_dim,
    "tamagotchi-signal": _tamagotchi_signal,
    "trashbot-bins": _trashbot_bins,
}


def preset(name: str, base_seed: int | None = None) -> ExperimentConfig:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
    cfg = factory()
    if base_seed is not None:
        cfg.base_seed = int(base_seed)
        cfg.validate()
    return cfg
