"""Evaluation oracles: MCTS, exact Kuhn equilibria, CFR, best responses."""

from .evaluate import MatchupReport, evaluate_matchup, exact_poker_matchup
from .mcts import MctsAgent, SearchResult, mcts_act, mcts_search
from .policies import BehaviorAgent, BehaviorPolicy, SeatedAgent, UniformAgent, kuhn_nash_policy
from .tree import CFRSolver, CfrState, PokerTree, cfr_solve, exploitability, log_schedule, regret_matching

__all__ = [
    "BehaviorAgent",
    "BehaviorPolicy",
    "CFRSolver",
    "CfrState",
    "MatchupReport",
    "MctsAgent",
    "PokerTree",
    "SearchResult",
    "SeatedAgent",
    "UniformAgent",
    "cfr_solve",
    "evaluate_matchup",
    "exact_poker_matchup",
    "exploitability",
    "kuhn_nash_policy",
    "log_schedule",
    "mcts_act",
    "mcts_search",
    "regret_matching",
]
