"""Tabular, model-based, exploration and policy-gradient learners."""

from rlchallenges.agents.exploration import ArchiveEntry, GoExploreArchive, go_explore_step, replay
from rlchallenges.agents.learners import (
    AGENTS,
    Agent,
    CountBonusQ,
    DynaQ,
    GoExplore,
    NStepSarsa,
    PrioritizedSweeping,
    QLearning,
    Reinforce,
    RiskSensitiveQ,
    Sarsa,
    TabularAgent,
    ValueIterationAgent,
    descriptive_mdp,
    greedy_return,
    greedy_rollout,
    make_agent,
)
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
    trashbot_features,
)
from rlchallenges.agents.table import LearnerConfig, ValueTable, epsilon_greedy, greedy_action
from rlchallenges.agents.td import (
    count_bonus_reward,
    nstep_sarsa_episode_update,
    nstep_targets,
    q_learning_update,
    risk_sensitive_q_update,
    sarsa_update,
)

__all__ = [
    "AGENTS",
    "Agent",
    "ArchiveEntry",
    "CountBonusQ",
    "DynaQ",
    "GoExplore",
    "GoExploreArchive",
    "LearnerConfig",
    "LinearGaussianPolicy",
    "NStepSarsa",
    "PrioritizedSweeping",
    "PriorityQueue",
    "QLearning",
    "Reinforce",
    "RiskSensitiveQ",
    "RunningMean",
    "Sarsa",
    "SoftmaxPolicy",
    "TabularAgent",
    "TabularMDP",
    "TabularModel",
    "ValueIterationAgent",
    "ValueTable",
    "count_bonus_reward",
    "default_features",
    "descriptive_mdp",
    "dyna_learn_step",
    "epsilon_greedy",
    "go_explore_step",
    "greedy_action",
    "greedy_return",
    "greedy_rollout",
    "make_agent",
    "nstep_sarsa_episode_update",
    "nstep_targets",
    "prioritized_sweeping_step",
    "q_learning_update",
    "replay",
    "reinforce_episode_update",
    "risk_sensitive_q_update",
    "sarsa_update",
    "trashbot_features",
    "value_iteration",
]
