"""Seeded experiment harness: configs, runner, aggregation, outputs, presets."""

from rlchallenges.experiments.config import ExperimentConfig, RunSpec, load_config, save_config
from rlchallenges.experiments.outputs import (
    CSV_HEADER,
    Curve,
    aggregate,
    curves_to_csv,
    curves_to_svg,
    final_performance,
    mean_and_stderr,
    moving_average,
    write_outputs,
)
from rlchallenges.experiments.presets import PRESETS, preset
from rlchallenges.experiments.runner import (
    BudgetExceeded,
    EpisodeRow,
    Monitor,
    RunRecord,
    run_experiment,
    run_repetition,
)

__all__ = [
    "BudgetExceeded",
    "CSV_HEADER",
    "Curve",
    "EpisodeRow",
    "ExperimentConfig",
    "Monitor",
    "PRESETS",
    "RunRecord",
    "RunSpec",
    "aggregate",
    "curves_to_csv",
    "curves_to_svg",
    "final_performance",
    "load_config",
    "mean_and_stderr",
    "moving_average",
    "preset",
    "run_experiment",
    "run_repetition",
    "save_config",
    "write_outputs",
]
