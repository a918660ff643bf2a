"""Text action grammar: extraction from raw responses and canonicalization."""

from __future__ import annotations

import enum
import re
from typing import Optional, Union

from .base import GameId, GameState

_ANSWER = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)

_GRAMMAR: dict[GameId, list[tuple[re.Pattern, object]]] = {
    GameId.TICTACTOE: [
        (re.compile(r"<\s*([XO])\s*\(\s*([0-2])\s*,\s*([0-2])\s*\)\s*>"), lambda m: f"<{m[1]}({m[2]},{m[3]})>"),
    ],
    GameId.CONNECT4: [
        (re.compile(r"<\s*([XO])\s*\(\s*([0-6])\s*\)\s*>"), lambda m: f"<{m[1]}({m[2]})>"),
    ],
    GameId.KUHN: [(re.compile(r"<\s*(PASS|BET)\s*>"), lambda m: f"<{m[1]}>")],
    GameId.LEDUC: [(re.compile(r"<\s*(FOLD|CALL|RAISE)\s*>"), lambda m: f"<{m[1]}>")],
}
_HANABI = [
    (re.compile(r"<\s*(Play|Discard)\s+[Cc][Aa][Rr][Dd]\s+(\d+)\s*>"), lambda m: f"<{m[1]} card {int(m[2])}>"),
    (re.compile(r"<\s*Reveal\s+player\s+\+1\s+color\s+([A-Z])\s*>"), lambda m: f"<Reveal player +1 color {m[1]}>"),
    (re.compile(r"<\s*Reveal\s+player\s+\+1\s+rank\s+(\d+)\s*>"), lambda m: f"<Reveal player +1 rank {int(m[1])}>"),
]
_GRAMMAR[GameId.MINI_HANABI] = _HANABI
_GRAMMAR[GameId.SIMPLE_HANABI] = _HANABI


class ParseFailure(str, enum.Enum):
    NO_ANSWER_TAG = "no-answer-tag"
    MALFORMED = "malformed-action"
    ILLEGAL = "illegal-action"

    def __str__(self) -> str:
        return self.value


def canonicalize(game: GameId, text: str) -> Optional[str]:
    """Canonical ActionText for ``text`` if it is one whole action of ``game``'s grammar."""
    text = text.strip()
    for pattern, fmt in _GRAMMAR[GameId(game)]:
        m = pattern.fullmatch(text)
        if m:
            return fmt(m)
    return None


def parse_action(game: GameId, raw: str, state: Optional[GameState] = None) -> Union[str, ParseFailure]:
    """Extract the last ``<answer>`` span of ``raw`` and canonicalize it.

    Failures are returned, not raised.  Legality is only checked when
    ``state`` is given.
    """
    spans = _ANSWER.findall(raw)
    if not spans:
        return ParseFailure.NO_ANSWER_TAG
    action = canonicalize(game, spans[-1])
    if action is None:
        return ParseFailure.MALFORMED
    if state is not None and action not in state.legal_actions():
        return ParseFailure.ILLEGAL
    return action


def format_answer(action: str) -> str:
    return f"<answer>{action}</answer>"
