"""Fixed behavior policies: uniform random, tabular information-set policies, Kuhn equilibria."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

from ..games import GameState, format_answer
from ..policy import Emission

Number = Union[float, Fraction]


def _draw(actions, probs, rng: np.random.Generator) -> tuple[str, float]:
    p = np.asarray(probs, dtype=float)
    p = p / p.sum()
    idx = min(int(np.searchsorted(np.cumsum(p), rng.random(), side="right")), len(p) - 1)
    while p[idx] == 0.0:
        idx -= 1
    return actions[idx], float(np.log(p[idx]))


def _emit(action: str, logprob: float) -> Emission:
    return Emission(format_answer(action), (action,), (logprob,))


@dataclass(frozen=True)
class UniformAgent:
    def act(self, state: GameState, rng: np.random.Generator) -> Emission:
        legal = state.legal_actions()
        return _emit(legal[int(rng.integers(len(legal)))], -float(np.log(len(legal))))

    def state_action_probs(self, state: GameState) -> dict[str, float]:
        legal = state.legal_actions()
        return {a: 1.0 / len(legal) for a in legal}


@dataclass
class BehaviorPolicy:
    """Information-state key -> {action: probability}.  Unlisted states play uniformly."""

    table: dict[str, dict[str, Number]] = field(default_factory=dict)

    def probs(self, key: str, legal) -> dict[str, float]:
        row = self.table.get(key)
        if row is None:
            return {a: 1.0 / len(legal) for a in legal}
        out = {a: float(row.get(a, 0.0)) for a in legal}
        s = sum(out.values())
        return {a: v / s for a, v in out.items()} if s > 0 else {a: 1.0 / len(legal) for a in legal}

    def validate(self, tol: float = 1e-9) -> None:
        for key, row in self.table.items():
            vals = [float(v) for v in row.values()]
            if min(vals) < -tol or abs(sum(vals) - 1.0) > tol:
                raise ValueError(f"probabilities at {key!r} do not form a distribution")

    def to_text(self) -> str:
        lines = []
        for key in sorted(self.table):
            row = " ".join(f"{a}={float(p):.12g}" for a, p in self.table[key].items())
            lines.append(f"{key}\t{row}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BehaviorPolicy":
        table = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, row = line.split("\t")
            table[key] = {a: float(p) for a, p in (item.rsplit("=", 1) for item in row.split())}
        return cls(table)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path) -> "BehaviorPolicy":
        return cls.from_text(Path(path).read_text())


@dataclass
class BehaviorAgent:
    """Plays a :class:`BehaviorPolicy` keyed by the engine's information-state key."""

    policy: BehaviorPolicy

    def state_action_probs(self, state: GameState) -> dict[str, float]:
        return self.policy.probs(state.info_key(), state.legal_actions())

    def act(self, state: GameState, rng: np.random.Generator) -> Emission:
        probs = self.state_action_probs(state)
        actions = list(probs)
        return _emit(*_draw(actions, [probs[a] for a in actions], rng))


@dataclass
class SeatedAgent:
    """Dispatches to one agent per seat, e.g. an equilibrium pair."""

    seats: tuple

    def act(self, state: GameState, rng: np.random.Generator) -> Emission:
        return self.seats[state.player].act(state, rng)

    def state_action_probs(self, state: GameState) -> dict[str, float]:
        return self.seats[state.player].state_action_probs(state)


def kuhn_nash_policy(alpha: Number = Fraction(1, 6)) -> tuple[BehaviorPolicy, BehaviorPolicy]:
    """The classical one-parameter family of Kuhn equilibria, as exact fractions.

    Player 0 bets J with ``alpha``, checks Q and calls a bet with it at
    ``alpha + 1/3``, bets K with ``3 * alpha``.  Player 1 bets J after a check
    1/3 of the time, calls with Q 1/3 of the time, always bets/calls K and
    never calls with J.
    """
    a = Fraction(alpha).limit_denominator(10**12) if isinstance(alpha, float) else Fraction(alpha)
    if not 0 <= a <= Fraction(1, 3):
        raise ValueError(f"alpha must lie in [0, 1/3], got {alpha}")
    third = Fraction(1, 3)

    def row(bet):
        return {"<PASS>": 1 - bet, "<BET>": bet}

    p0 = BehaviorPolicy({
        "J:": row(a), "Q:": row(Fraction(0)), "K:": row(3 * a),
        "J:pb": row(Fraction(0)), "Q:pb": row(a + third), "K:pb": row(Fraction(1)),
    })
    p1 = BehaviorPolicy({
        "J:p": row(third), "Q:p": row(Fraction(0)), "K:p": row(Fraction(1)),
        "J:b": row(Fraction(0)), "Q:b": row(third), "K:b": row(Fraction(1)),
    })
    return p0, p1
