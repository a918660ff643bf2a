"""Kuhn poker and Leduc hold'em."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional

from .base import GameId, GameState, TerminalReason, TurnOutcome, chance_rng

RANKS = ("J", "Q", "K")
RANK_NAMES = {"J": "Jack", "Q": "Queen", "K": "King"}
ANTE_LINE = "1. Blind ante: both player_0 and player_1 place 1 chip into the pot."

PASS, BET = "<PASS>", "<BET>"
FOLD, CALL, RAISE = "<FOLD>", "<CALL>", "<RAISE>"
_LETTER = {PASS: "p", BET: "b", FOLD: "f", CALL: "c", RAISE: "r"}


def _action_lines(start: int, actions, first_player: int = 0) -> list[str]:
    return [f"{start + i}. player_{(first_player + i) % 2} takes action {a}." for i, a in enumerate(actions)]


# ----------------------------------------------------------------------------- Kuhn


@dataclass(frozen=True)
class KuhnState(GameState):
    cards: tuple[int, int] = (0, 1)
    history: tuple[str, ...] = ()
    player: int = 0
    turn: int = 1
    seed: int = 0
    terminal: bool = False

    game = GameId.KUHN

    @classmethod
    def from_seed(cls, seed: int) -> "KuhnState":
        perm = chance_rng(seed, 0).permutation(3)
        return cls(cards=(int(perm[0]), int(perm[1])), seed=seed)

    @staticmethod
    def deals() -> list[tuple[int, int]]:
        """The six equiprobable ordered deals."""
        return list(itertools.permutations(range(3), 2))

    @property
    def pot(self) -> int:
        return 2 + sum(a == BET for a in self.history)

    def legal_actions(self) -> list[str]:
        self._check_live()
        return [PASS, BET]

    def apply(self, action: str) -> TurnOutcome:
        self._check_legal(action)
        h = self.history + (action,)
        nxt = replace(self, history=h, player=1 - self.player, turn=self.turn + 1)
        payoff, reason = _kuhn_payoff(h, self.cards)
        if payoff is None:
            return TurnOutcome(nxt, (0.0, 0.0), False)
        nxt = replace(nxt, terminal=True)
        return TurnOutcome(nxt, (float(payoff), float(-payoff)), True, reason)

    def observe(self, player: int) -> str:
        card = RANKS[self.cards[player]]
        lines = [ANTE_LINE, f"2. Deal: your card is {RANK_NAMES[card]} ({card})."]
        lines += _action_lines(3, self.history)
        return "\n".join(lines)

    def info_key(self, player: Optional[int] = None) -> str:
        p = self.player if player is None else player
        return RANKS[self.cards[p]] + ":" + "".join(_LETTER[a] for a in self.history)


def _kuhn_payoff(h: tuple[str, ...], cards: tuple[int, int]):
    """Net chips to player 0 at a terminal history, else ``(None, None)``."""
    hi = 1 if cards[0] > cards[1] else -1
    if h == (PASS, PASS):
        return hi, TerminalReason.WIN
    if h == (BET, PASS):
        return 1, TerminalReason.FOLD
    if h == (PASS, BET, PASS):
        return -1, TerminalReason.FOLD
    if h in ((BET, BET), (PASS, BET, BET)):
        return 2 * hi, TerminalReason.WIN
    return None, None


# ---------------------------------------------------------------------------- Leduc

LEDUC_DECK = (0, 0, 1, 1, 2, 2)
RAISE_SIZE = (2, 4)
MAX_RAISES = 2


@dataclass(frozen=True)
class LeducState(GameState):
    cards: tuple[int, int] = (0, 1)
    public: int = 2
    rounds: tuple[tuple[str, ...], ...] = ((),)
    contrib: tuple[int, int] = (1, 1)
    player: int = 0
    turn: int = 1
    seed: int = 0
    terminal: bool = False

    game = GameId.LEDUC

    @classmethod
    def from_seed(cls, seed: int) -> "LeducState":
        perm = chance_rng(seed, 0).permutation(6)
        c0, c1, pub = (LEDUC_DECK[int(i)] for i in perm[:3])
        return cls(cards=(c0, c1), public=pub, seed=seed)

    @staticmethod
    def deals() -> list[tuple[int, int, int]]:
        """Rank triples (card0, card1, public) of the 120 equiprobable physical deals."""
        return [tuple(LEDUC_DECK[i] for i in p) for p in itertools.permutations(range(6), 3)]

    @property
    def round(self) -> int:
        return len(self.rounds) - 1

    @property
    def pot(self) -> int:
        return self.contrib[0] + self.contrib[1]

    @property
    def raises(self) -> int:
        return sum(a == RAISE for a in self.rounds[-1])

    def legal_actions(self) -> list[str]:
        self._check_live()
        p = self.player
        out = []
        if self.contrib[1 - p] > self.contrib[p]:
            out.append(FOLD)
        out.append(CALL)
        if self.raises < MAX_RAISES:
            out.append(RAISE)
        return out

    def apply(self, action: str) -> TurnOutcome:
        self._check_legal(action)
        p, o = self.player, 1 - self.player
        contrib = list(self.contrib)
        rounds = self.rounds[:-1] + (self.rounds[-1] + (action,),)
        base = dict(rounds=rounds, turn=self.turn + 1)
        if action == FOLD:
            nxt = replace(self, **base, player=o, terminal=True)
            rewards = [0.0, 0.0]
            rewards[p], rewards[o] = -float(contrib[p]), float(contrib[p])
            return TurnOutcome(nxt, tuple(rewards), True, TerminalReason.FOLD)
        if action == RAISE:
            contrib[p] = contrib[o] + RAISE_SIZE[self.round]
            nxt = replace(self, **base, contrib=tuple(contrib), player=o)
            return TurnOutcome(nxt, (0.0, 0.0), False)
        contrib[p] = contrib[o]
        if len(rounds[-1]) < 2:
            nxt = replace(self, **base, contrib=tuple(contrib), player=o)
            return TurnOutcome(nxt, (0.0, 0.0), False)
        if self.round == 0:
            nxt = replace(self, rounds=rounds + ((),), turn=self.turn + 1, contrib=tuple(contrib), player=0)
            return TurnOutcome(nxt, (0.0, 0.0), False)
        nxt = replace(self, **base, contrib=tuple(contrib), player=o, terminal=True)
        w = leduc_winner(self.cards, self.public)
        if w is None:
            return TurnOutcome(nxt, (0.0, 0.0), True, TerminalReason.DRAW)
        rewards = [0.0, 0.0]
        rewards[w], rewards[1 - w] = float(contrib[1 - w]), -float(contrib[1 - w])
        return TurnOutcome(nxt, tuple(rewards), True, TerminalReason.WIN)

    def observe(self, player: int) -> str:
        lines = [ANTE_LINE, f"2. Deal: your card is {RANKS[self.cards[player]]}."]
        lines += _action_lines(3, self.rounds[0])
        if len(self.rounds) > 1:
            lines.append(f"{len(lines) + 1}. Public card: {RANKS[self.public]}.")
            lines += _action_lines(len(lines) + 1, self.rounds[1])
        return "\n".join(lines)

    def info_key(self, player: Optional[int] = None) -> str:
        p = self.player if player is None else player
        pub = RANKS[self.public] if len(self.rounds) > 1 else ""
        hist = "/".join("".join(_LETTER[a] for a in r) for r in self.rounds)
        return f"{RANKS[self.cards[p]]}{pub}:{hist}"


def leduc_winner(cards: tuple[int, int], public: int) -> Optional[int]:
    pair = [c == public for c in cards]
    if pair[0] != pair[1]:
        return 0 if pair[0] else 1
    if cards[0] == cards[1]:
        return None
    return 0 if cards[0] > cards[1] else 1
