"""Opponent spec strings: ``mcts:N``, ``kuhn_nash[:alpha]``, ``cfr[:path]``, ``uniform``, ``self``."""

from __future__ import annotations

import functools
from fractions import Fraction
from pathlib import Path

from ..games import GameId
from ..opponents import BehaviorAgent, BehaviorPolicy, MctsAgent, UniformAgent, cfr_solve, kuhn_nash_policy


class OpponentSpecError(ValueError):
    pass


def _merge(pair) -> BehaviorPolicy:
    # seat infosets are disjoint (the betting history fixes whose turn it is), so one table serves both
    table = {}
    for p in pair:
        table.update(p.table)
    return BehaviorPolicy(table)


@functools.lru_cache(maxsize=8)
def solved_policy(game: str, iterations: int) -> BehaviorPolicy:
    pair, _ = cfr_solve(game, iterations, schedule=[iterations])
    return _merge(pair)


def parse_alpha(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise OpponentSpecError(f"bad alpha {text!r}") from exc


def make_opponent(spec: str, game: GameId | str, learner=None, cfr_iterations: int = 5000):
    """Build the agent named by ``spec`` for ``game``; ``self`` returns ``learner``."""
    game = GameId(game)
    name, _, arg = spec.strip().partition(":")
    if name == "uniform":
        return UniformAgent()
    if name == "self":
        if learner is None:
            raise OpponentSpecError("'self' needs a learner policy")
        return learner
    if name == "mcts":
        if not game.is_perfect_information:
            raise OpponentSpecError(f"mcts opponents need a perfect-information game, not {game.value}")
        try:
            sims = int(arg) if arg else 100
        except ValueError as exc:
            raise OpponentSpecError(f"bad simulation count {arg!r}") from exc
        if sims < 1:
            raise OpponentSpecError("simulation count must be >= 1")
        return MctsAgent(sims)
    if name == "kuhn_nash":
        if game != GameId.KUHN:
            raise OpponentSpecError(f"kuhn_nash only plays kuhn, not {game.value}")
        alpha = parse_alpha(arg) if arg else Fraction(1, 6)
        try:
            return BehaviorAgent(_merge(kuhn_nash_policy(alpha)))
        except ValueError as exc:
            raise OpponentSpecError(str(exc)) from exc
    if name == "cfr":
        if game not in (GameId.KUHN, GameId.LEDUC):
            raise OpponentSpecError(f"cfr opponents exist for kuhn and leduc, not {game.value}")
        if arg:
            path = Path(arg)
            if not path.exists():
                raise OpponentSpecError(f"no policy file at {path}")
            return BehaviorAgent(BehaviorPolicy.load(path))
        return BehaviorAgent(solved_policy(game.value, cfr_iterations))
    raise OpponentSpecError(f"unknown opponent spec {spec!r}")


def is_exact(spec: str, game: GameId | str) -> bool:
    """Whether the matchup against ``spec`` can be scored exactly by tree expectation."""
    name = spec.partition(":")[0]
    return GameId(game) in (GameId.KUHN, GameId.LEDUC) and name in ("kuhn_nash", "cfr", "uniform")


__all__ = ["OpponentSpecError", "is_exact", "make_opponent", "parse_alpha", "solved_policy"]
