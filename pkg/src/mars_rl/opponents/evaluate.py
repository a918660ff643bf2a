"""Head-to-head evaluation in game units."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..games import MAX_ABS_REWARD, GameId
from ..rollout import Agent, run_episode
from .tree import PokerTree


@dataclass(frozen=True)
class MatchupReport:
    game: str
    n_games: int
    seat0_mean: float
    seat1_mean: float
    mean: float
    ci95: float
    normalized: float
    seat0_normalized: float
    seat1_normalized: float
    format_violations: int

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate_matchup(agent_a: Agent, agent_b: Agent, game: GameId | str, n_games: int = 1000,
                     base_seed: int = 0) -> MatchupReport:
    """``agent_a``'s mean game return, half the games from each seat.

    Cooperative games report the shared self-play score, so pass the same
    agent twice there.
    """
    game = GameId(game)
    if n_games % 2:
        raise ValueError("n_games must be even so both seats are played equally")
    half = n_games // 2
    returns = [[], []]
    violations = 0
    for i in range(n_games):
        seat = 0 if i < half else 1
        seats = (agent_a, agent_b) if seat == 0 else (agent_b, agent_a)
        trajs = run_episode(game, *seats, seed=base_seed + i, episode_id=i)
        returns[seat].append(trajs[seat].game_return)
        violations += any(t.format_violation for t in trajs)
    allr = np.array(returns[0] + returns[1])
    scale = MAX_ABS_REWARD[game]
    s0, s1 = float(np.mean(returns[0])), float(np.mean(returns[1]))
    ci = 1.96 * float(allr.std(ddof=1)) / math.sqrt(len(allr)) if len(allr) > 1 else float("nan")
    return MatchupReport(game.value, n_games, s0, s1, float(allr.mean()), ci, float(allr.mean()) / scale,
                         s0 / scale, s1 / scale, violations)


def exact_poker_matchup(agent_a, agent_b, game: GameId | str = GameId.KUHN,
                        tree: Optional[PokerTree] = None) -> tuple[float, float]:
    """Exact expected return of ``agent_a`` in seat 0 and seat 1.

    Both agents must expose ``state_action_probs(state)``.
    """
    tree = tree or PokerTree(game)
    ta = tree.tables_from(agent_a.state_action_probs)
    tb = tree.tables_from(agent_b.state_action_probs)
    return tree.expected_value(ta, tb), -tree.expected_value(tb, ta)
