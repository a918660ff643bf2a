"""Turn-level, agent-specific group-relative self-play for two-player games."""

from .advantage import (SCHEMES, AdvantageAssignment, TurnAdvantageEstimator, agent_specific_advantage, gae,
                        mars_turn_advantage, naive_group_advantage, process_supervision_advantage)
from .estimator import MarsSelfPlay
from .games import GameId, apply_action, init_game, legal_actions, observe, parse_action
from .objective import surrogate_objective
from .policy import TabularPolicy, kl_divergence
from .rewards import RewardConfig, compose_turn_reward, length_reward
from .rollout import Group, Trajectory, collect_group, run_episode
from .train import OptimConfig, train_step

__version__ = "0.1.0"

__all__ = [
    "SCHEMES",
    "AdvantageAssignment",
    "GameId",
    "Group",
    "MarsSelfPlay",
    "OptimConfig",
    "RewardConfig",
    "TabularPolicy",
    "Trajectory",
    "TurnAdvantageEstimator",
    "agent_specific_advantage",
    "apply_action",
    "collect_group",
    "compose_turn_reward",
    "gae",
    "init_game",
    "kl_divergence",
    "legal_actions",
    "length_reward",
    "mars_turn_advantage",
    "naive_group_advantage",
    "observe",
    "parse_action",
    "process_supervision_advantage",
    "run_episode",
    "surrogate_objective",
    "train_step",
]
