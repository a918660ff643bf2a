"""Two-player Hanabi variants with small decks.

A card is a ``(color_index, rank)`` pair.  Knowledge is tracked per hand slot
as the sets of colors and ranks the holder still considers possible.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .base import GameId, GameState, TerminalReason, TurnOutcome, chance_rng

Card = tuple[int, int]
Knowledge = tuple[tuple[int, ...], tuple[int, ...]]

COLOR_NAMES = {"R": "Red", "Y": "Yellow", "G": "Green", "W": "White", "B": "Blue"}


@dataclass(frozen=True)
class HanabiRules:
    name: GameId
    colors: tuple[str, ...]
    ranks: tuple[int, ...]
    copies: tuple[int, ...]  # copies per rank, aligned with ``ranks``
    hand_size: int
    max_info: int
    max_lives: int

    @property
    def deck(self) -> list[Card]:
        return [(c, r) for c in range(len(self.colors)) for r, n in zip(self.ranks, self.copies) for _ in range(n)]

    @property
    def max_score(self) -> int:
        return len(self.colors) * max(self.ranks)


MINI_HANABI = HanabiRules(GameId.MINI_HANABI, ("R", "Y"), (1, 2), (3, 1), 3, 3, 3)
SIMPLE_HANABI = HanabiRules(GameId.SIMPLE_HANABI, ("R", "Y", "G"), (1, 2), (3, 1), 5, 8, 3)
RULES = {GameId.MINI_HANABI: MINI_HANABI, GameId.SIMPLE_HANABI: SIMPLE_HANABI}


def _plural(n: int, word: str) -> str:
    return f"{n} {word}" if n == 1 else f"{n} {word}s"


@dataclass(frozen=True)
class HanabiState(GameState):
    rules: HanabiRules = MINI_HANABI
    hands: tuple[tuple[Card, ...], ...] = ((), ())
    knowledge: tuple[tuple[Knowledge, ...], ...] = ((), ())
    deck: tuple[Card, ...] = ()
    stacks: tuple[int, ...] = (0, 0)
    discards: tuple[Card, ...] = ()
    info: int = 3
    lives: int = 3
    score: int = 0
    final_turns: Optional[int] = None
    player: int = 0
    turn: int = 1
    seed: int = 0
    terminal: bool = False

    @property
    def game(self) -> GameId:  # type: ignore[override]
        return self.rules.name

    @classmethod
    def from_seed(cls, rules: HanabiRules, seed: int) -> "HanabiState":
        deck = rules.deck
        order = chance_rng(seed, 0).permutation(len(deck))
        return cls.from_deck(rules, [deck[int(i)] for i in order], seed=seed)

    @classmethod
    def from_deck(cls, rules: HanabiRules, deck: Sequence[Card], seed: int = 0) -> "HanabiState":
        """Deal from an explicit deck order: player 0's hand, player 1's hand, then the draw pile."""
        n = rules.hand_size
        deck = tuple(tuple(c) for c in deck)
        blank = cls._blank(rules)
        return cls(
            rules=rules,
            hands=(deck[:n], deck[n : 2 * n]),
            knowledge=((blank,) * n, (blank,) * n),
            deck=deck[2 * n :],
            stacks=(0,) * len(rules.colors),
            info=rules.max_info,
            lives=rules.max_lives,
            seed=seed,
        )

    @staticmethod
    def _blank(rules: HanabiRules) -> Knowledge:
        return tuple(range(len(rules.colors))), tuple(rules.ranks)

    # -- actions ---------------------------------------------------------------

    def legal_actions(self) -> list[str]:
        self._check_live()
        n = len(self.hands[self.player])
        out = [f"<Play card {i}>" for i in range(n)]
        if self.info < self.rules.max_info:
            out += [f"<Discard card {i}>" for i in range(n)]
        if self.info > 0:
            partner = self.hands[1 - self.player]
            colors = {c for c, _ in partner}
            ranks = {r for _, r in partner}
            out += [f"<Reveal player +1 color {self.rules.colors[c]}>" for c in sorted(colors)]
            out += [f"<Reveal player +1 rank {r}>" for r in sorted(ranks)]
        return out

    def apply(self, action: str) -> TurnOutcome:
        self._check_legal(action)
        p, o = self.player, 1 - self.player
        words = action[1:-1].split()
        kind = words[0]
        if kind == "Reveal":
            return self._reveal(words[3], words[4])
        idx = int(words[2])
        card = self.hands[p][idx]
        hands = list(self.hands)
        know = list(self.knowledge)
        hands[p] = self.hands[p][:idx] + self.hands[p][idx + 1 :]
        know[p] = self.knowledge[p][:idx] + self.knowledge[p][idx + 1 :]
        stacks, discards = self.stacks, self.discards
        info, lives, score = self.info, self.lives, self.score
        reward = 0.0
        if kind == "Play":
            color, rank = card
            if stacks[color] == rank - 1:
                stacks = stacks[:color] + (rank,) + stacks[color + 1 :]
                score += 1
                reward = 1.0
            else:
                lives -= 1
                discards = discards + (card,)
        else:
            info = min(info + 1, self.rules.max_info)
            discards = discards + (card,)

        if lives == 0:
            # losing the last life forfeits every point earned so far
            nxt = replace(self, hands=tuple(hands), knowledge=tuple(know), stacks=stacks, discards=discards,
                          lives=0, score=0, player=o, turn=self.turn + 1, terminal=True)
            return TurnOutcome(nxt, (-float(self.score),) * 2, True, TerminalReason.LIVES_EXHAUSTED)

        deck = self.deck
        final_turns = self.final_turns
        if final_turns is not None:
            final_turns -= 1
        if deck:
            hands[p] = hands[p] + (deck[0],)
            know[p] = know[p] + (self._blank(self.rules),)
            deck = deck[1:]
            if not deck and final_turns is None:
                # each player gets one more turn once the last card is drawn
                final_turns = 2
        nxt = replace(self, hands=tuple(hands), knowledge=tuple(know), deck=deck, stacks=stacks,
                      discards=discards, info=info, lives=lives, score=score, final_turns=final_turns,
                      player=o, turn=self.turn + 1)
        return self._finish(nxt, reward)

    def _reveal(self, what: str, value: str) -> TurnOutcome:
        o = 1 - self.player
        know = list(self.knowledge)
        updated = []
        if what == "color":
            c = self.rules.colors.index(value)
            for (cc, _), (cols, rks) in zip(self.hands[o], self.knowledge[o]):
                cols = (c,) if cc == c else tuple(x for x in cols if x != c)
                updated.append((cols, rks))
        else:
            r = int(value)
            for (_, rr), (cols, rks) in zip(self.hands[o], self.knowledge[o]):
                rks = (r,) if rr == r else tuple(x for x in rks if x != r)
                updated.append((cols, rks))
        know[o] = tuple(updated)
        final_turns = None if self.final_turns is None else self.final_turns - 1
        nxt = replace(self, knowledge=tuple(know), info=self.info - 1, final_turns=final_turns,
                      player=o, turn=self.turn + 1)
        return self._finish(nxt, 0.0)

    def _finish(self, nxt: "HanabiState", reward: float) -> TurnOutcome:
        if nxt.score == self.rules.max_score:
            return TurnOutcome(replace(nxt, terminal=True), (reward, reward), True, TerminalReason.WIN)
        if nxt.final_turns == 0:
            return TurnOutcome(replace(nxt, terminal=True), (reward, reward), True, TerminalReason.DECK_EMPTY)
        return TurnOutcome(nxt, (reward, reward), False)

    # -- rendering -------------------------------------------------------------

    def card_name(self, card: Card) -> str:
        return f"{self.rules.colors[card[0]]}{card[1]}"

    def _knowledge_text(self, k: Knowledge) -> str:
        cols = ", ".join(self.rules.colors[c] for c in k[0])
        rks = ", ".join(str(r) for r in k[1])
        return f"one of the colors [{cols}] and one of the ranks [{rks}]"

    def observe(self, player: int) -> str:
        o = 1 - player
        stacks = " ".join(f"{c}{s}" for c, s in zip(self.rules.colors, self.stacks))
        discards = ", ".join(self.card_name(c) for c in self.discards) or "None"
        remain = "remains" if len(self.deck) == 1 else "remain"
        lines = [
            f"1. There are {_plural(self.lives, 'life token')} and {_plural(self.info, 'information token')} remaining.",
            f"2. The top of the color stacks are: {stacks}.",
            f"3. {_plural(len(self.deck), 'card')} {remain} in the draw pile.",
            f"4. The discard pile currently contains: {discards}.",
            "5. The other player's hand:",
        ]
        for i, (card, k) in enumerate(zip(self.hands[o], self.knowledge[o])):
            lines.append(f"    - Card {i} ({self.card_name(card)}): the other player believes it is {self._knowledge_text(k)}.")
        lines.append("6. Your own hand, based on the revealed information:")
        for i, k in enumerate(self.knowledge[player]):
            lines.append(f"    - Card {i}: {self._knowledge_text(k)}.")
        return "\n".join(lines)
