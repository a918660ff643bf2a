"""Turn-level engines for the six two-player games."""

from __future__ import annotations

from .actions import ParseFailure, canonicalize, format_answer, parse_action
from .base import ContractViolation, GameId, GameState, TerminalReason, TurnOutcome, chance_rng
from .board import Connect4State, TicTacToeState
from .hanabi import MINI_HANABI, RULES as HANABI_RULES, SIMPLE_HANABI, HanabiRules, HanabiState
from .poker import KuhnState, LeducState
from .prompts import render_listing, render_prompt

# largest absolute episode return in game units, used to normalize returns
MAX_ABS_REWARD = {
    GameId.TICTACTOE: 1.0,
    GameId.CONNECT4: 1.0,
    GameId.KUHN: 2.0,
    GameId.LEDUC: 13.0,
    GameId.MINI_HANABI: float(MINI_HANABI.max_score),
    GameId.SIMPLE_HANABI: float(SIMPLE_HANABI.max_score),
}


def init_game(game: GameId | str, seed: int = 0) -> GameState:
    """Turn-1 state with every chance event resolved from ``seed``."""
    game = GameId(game)
    if game == GameId.TICTACTOE:
        return TicTacToeState(seed=seed)
    if game == GameId.CONNECT4:
        return Connect4State(seed=seed)
    if game == GameId.KUHN:
        return KuhnState.from_seed(seed)
    if game == GameId.LEDUC:
        return LeducState.from_seed(seed)
    return HanabiState.from_seed(HANABI_RULES[game], seed)


def legal_actions(state: GameState) -> list[str]:
    return state.legal_actions()


def apply_action(state: GameState, action: str) -> TurnOutcome:
    return state.apply(action)


def observe(state: GameState, player: int) -> str:
    return state.observe(player)


__all__ = [
    "ContractViolation",
    "Connect4State",
    "GameId",
    "GameState",
    "HANABI_RULES",
    "HanabiRules",
    "HanabiState",
    "KuhnState",
    "LeducState",
    "MAX_ABS_REWARD",
    "MINI_HANABI",
    "ParseFailure",
    "SIMPLE_HANABI",
    "TerminalReason",
    "TicTacToeState",
    "TurnOutcome",
    "apply_action",
    "canonicalize",
    "chance_rng",
    "format_answer",
    "init_game",
    "legal_actions",
    "observe",
    "parse_action",
    "render_listing",
    "render_prompt",
]
