"""Tic-Tac-Toe and Connect Four."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

from .base import GameId, GameState, TerminalReason, TurnOutcome

MARKS = ("X", "O")
EMPTY = "_"


@lru_cache(maxsize=None)
def _lines(rows: int, cols: int, length: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for r in range(rows):
        for c in range(cols):
            for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
                cells = []
                for i in range(length):
                    rr, cc = r + dr * i, c + dc * i
                    if not (0 <= rr < rows and 0 <= cc < cols):
                        break
                    cells.append(rr * cols + cc)
                else:
                    out.append(tuple(cells))
    return tuple(out)


@lru_cache(maxsize=None)
def _lines_through(rows: int, cols: int, length: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    by_cell: list[list[tuple[int, ...]]] = [[] for _ in range(rows * cols)]
    for line in _lines(rows, cols, length):
        for cell in line:
            by_cell[cell].append(line)
    return tuple(tuple(x) for x in by_cell)


def _wins(board: tuple[str, ...], cell: int, rows: int, cols: int, length: int) -> bool:
    mark = board[cell]
    return any(all(board[i] == mark for i in line) for line in _lines_through(rows, cols, length)[cell])


def _render(board: tuple[str, ...], cols: int) -> str:
    return "\n".join("".join(board[i : i + cols]) for i in range(0, len(board), cols))


@dataclass(frozen=True)
class TicTacToeState(GameState):
    board: tuple[str, ...] = (EMPTY,) * 9
    player: int = 0
    turn: int = 1
    seed: int = 0
    terminal: bool = False
    winner: Optional[int] = None

    game = GameId.TICTACTOE
    rows = 3
    cols = 3

    def legal_actions(self) -> list[str]:
        self._check_live()
        mark = MARKS[self.player]
        return [f"<{mark}({i // 3},{i % 3})>" for i, v in enumerate(self.board) if v == EMPTY]

    def apply(self, action: str) -> TurnOutcome:
        self._check_legal(action)
        row, col = int(action[3]), int(action[5])
        cell = row * 3 + col
        board = list(self.board)
        board[cell] = MARKS[self.player]
        board = tuple(board)
        if _wins(board, cell, 3, 3, 3):
            rewards = (1.0, -1.0) if self.player == 0 else (-1.0, 1.0)
            nxt = replace(self, board=board, player=1 - self.player, turn=self.turn + 1, terminal=True, winner=self.player)
            return TurnOutcome(nxt, rewards, True, TerminalReason.WIN)
        full = EMPTY not in board
        nxt = replace(self, board=board, player=1 - self.player, turn=self.turn + 1, terminal=full)
        return TurnOutcome(nxt, (0.0, 0.0), full, TerminalReason.DRAW if full else None)

    def observe(self, player: int) -> str:
        return _render(self.board, 3)


@dataclass(frozen=True)
class Connect4State(GameState):
    board: tuple[str, ...] = (EMPTY,) * 42
    player: int = 0
    turn: int = 1
    seed: int = 0
    terminal: bool = False
    winner: Optional[int] = None

    game = GameId.CONNECT4
    rows = 6
    cols = 7

    def legal_actions(self) -> list[str]:
        self._check_live()
        mark = MARKS[self.player]
        return [f"<{mark}({c})>" for c in range(7) if self.board[c] == EMPTY]

    def apply(self, action: str) -> TurnOutcome:
        self._check_legal(action)
        col = int(action[3])
        # row 0 is the top; pieces settle in the lowest empty row
        row = max(r for r in range(6) if self.board[r * 7 + col] == EMPTY)
        cell = row * 7 + col
        board = list(self.board)
        board[cell] = MARKS[self.player]
        board = tuple(board)
        if _wins(board, cell, 6, 7, 4):
            rewards = (1.0, -1.0) if self.player == 0 else (-1.0, 1.0)
            nxt = replace(self, board=board, player=1 - self.player, turn=self.turn + 1, terminal=True, winner=self.player)
            return TurnOutcome(nxt, rewards, True, TerminalReason.WIN)
        full = EMPTY not in board[:7]
        nxt = replace(self, board=board, player=1 - self.player, turn=self.turn + 1, terminal=full)
        return TurnOutcome(nxt, (0.0, 0.0), full, TerminalReason.DRAW if full else None)

    def observe(self, player: int) -> str:
        return _render(self.board, 7)
