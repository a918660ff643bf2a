"""Shared types for the turn-level game engines."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np


class GameId(str, enum.Enum):
    TICTACTOE = "tictactoe"
    CONNECT4 = "connect4"
    KUHN = "kuhn"
    LEDUC = "leduc"
    MINI_HANABI = "mini_hanabi"
    SIMPLE_HANABI = "simple_hanabi"

    def __str__(self) -> str:
        return self.value

    @property
    def is_cooperative(self) -> bool:
        return self in (GameId.MINI_HANABI, GameId.SIMPLE_HANABI)

    @property
    def is_perfect_information(self) -> bool:
        return self in (GameId.TICTACTOE, GameId.CONNECT4)


class ContractViolation(RuntimeError):
    """Raised when an engine is queried outside its preconditions."""


class TerminalReason(str, enum.Enum):
    WIN = "win"
    DRAW = "draw"
    FOLD = "fold"
    LIVES_EXHAUSTED = "lives-exhausted"
    DECK_EMPTY = "deck-empty"
    FORMAT_VIOLATION = "format-violation"

    def __str__(self) -> str:
        return self.value


def chance_rng(seed: int, event: int) -> np.random.Generator:
    """Counter-based generator for chance event ``event`` of episode ``seed``."""
    mask = (1 << 64) - 1
    return np.random.Generator(np.random.Philox(key=[seed & mask, event & mask]))


class GameState:
    """Interface every engine state implements.

    Concrete states are frozen dataclasses; ``apply`` always returns a fresh
    state wrapped in a :class:`TurnOutcome`.
    """

    game: GameId
    player: int
    turn: int
    seed: int
    terminal: bool

    def legal_actions(self) -> list[str]:
        raise NotImplementedError

    def apply(self, action: str) -> "TurnOutcome":
        raise NotImplementedError

    def observe(self, player: int) -> str:
        raise NotImplementedError

    def _check_live(self) -> None:
        if self.terminal:
            raise ContractViolation(f"{self.game} state is terminal")

    def _check_legal(self, action: str) -> None:
        self._check_live()
        if action not in self.legal_actions():
            raise ContractViolation(f"illegal action {action!r} for {self.game}")


@dataclass(frozen=True)
class TurnOutcome:
    state: GameState
    rewards: tuple[float, float]
    terminal: bool
    reason: Optional[TerminalReason] = None
