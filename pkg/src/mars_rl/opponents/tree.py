"""Public betting trees for Kuhn and Leduc, vectorized over chance deals.

Betting actions never depend on the cards, so each game has one public tree
of betting histories.  Every quantity that does depend on the cards (payoffs,
reach probabilities, counterfactual values) is a vector indexed by deal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..games import GameId, GameState, KuhnState, LeducState
from .policies import BehaviorPolicy


@dataclass
class Node:
    player: int = -1
    actions: tuple[str, ...] = ()
    children: list[int] = field(default_factory=list)
    terminal: bool = False
    payoff: Optional[np.ndarray] = None  # net chips to player 0, per deal
    local: Optional[np.ndarray] = None  # deal -> row in this node's infoset table
    keys: list[str] = field(default_factory=list)  # row -> information-state key
    reps: list[GameState] = field(default_factory=list)  # row -> a state in that infoset
    members: Optional[np.ndarray] = None  # (rows, deals) 0/1 membership


class PokerTree:
    def __init__(self, game: GameId | str):
        self.game = GameId(game)
        if self.game == GameId.KUHN:
            roots = [KuhnState(cards=d) for d in KuhnState.deals()]
        elif self.game == GameId.LEDUC:
            roots = [LeducState(cards=d[:2], public=d[2]) for d in LeducState.deals()]
        else:
            raise ValueError(f"{self.game} has no poker tree; zero-sum poker games only")
        self.n_deals = len(roots)
        self.chance = np.full(self.n_deals, 1.0 / self.n_deals)
        self.nodes: list[Node] = []
        self._build(roots)

    def _build(self, states: list[GameState]) -> int:
        idx = len(self.nodes)
        node = Node()
        self.nodes.append(node)
        s0 = states[0]
        if s0.terminal:
            node.terminal = True
            return idx
        node.player = s0.player
        node.actions = tuple(s0.legal_actions())
        rows: dict[str, int] = {}
        local = np.empty(self.n_deals, dtype=int)
        for d, s in enumerate(states):
            key = s.info_key(s.player)
            if key not in rows:
                rows[key] = len(rows)
                node.keys.append(key)
                node.reps.append(s)
            local[d] = rows[key]
        node.local = local
        node.members = np.zeros((len(rows), self.n_deals))
        node.members[local, np.arange(self.n_deals)] = 1.0
        for a in node.actions:
            outs = [s.apply(a) for s in states]
            child = self._build([o.state for o in outs])
            if outs[0].terminal:
                self.nodes[child].payoff = np.array([o.rewards[0] for o in outs])
            node.children.append(child)
        return idx

    @property
    def decision_nodes(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if not n.terminal]

    @property
    def n_infosets(self) -> int:
        return sum(len(self.nodes[i].keys) for i in self.decision_nodes)

    # -- policies as per-node tables ---------------------------------------------

    def tables(self, policy: BehaviorPolicy) -> dict[int, np.ndarray]:
        """Per decision node: (rows, actions) probabilities of ``policy``."""
        out = {}
        for i in self.decision_nodes:
            n = self.nodes[i]
            out[i] = np.array([[policy.probs(k, n.actions)[a] for a in n.actions] for k in n.keys])
        return out

    def tables_from(self, probs_fn: Callable[[GameState], dict[str, float]]) -> dict[int, np.ndarray]:
        """Tables from any state -> action-probabilities callable (one call per infoset)."""
        out = {}
        for i in self.decision_nodes:
            n = self.nodes[i]
            out[i] = np.array([[probs_fn(s)[a] for a in n.actions] for s in n.reps])
        return out

    def behavior_policy(self, tables: dict[int, np.ndarray]) -> BehaviorPolicy:
        table = {}
        for i, t in tables.items():
            n = self.nodes[i]
            for r, key in enumerate(n.keys):
                table[key] = {a: float(p) for a, p in zip(n.actions, t[r])}
        return BehaviorPolicy(table)

    # -- evaluation ----------------------------------------------------------------

    def expected_value(self, t0: dict[int, np.ndarray], t1: dict[int, np.ndarray]) -> float:
        """Expected net chips to player 0 when both seats follow their tables."""
        tabs = (t0, t1)

        def rec(i: int) -> np.ndarray:
            n = self.nodes[i]
            if n.terminal:
                return n.payoff
            sigma = tabs[n.player][i][n.local]
            return sum(sigma[:, a] * rec(c) for a, c in enumerate(n.children))

        return float(self.chance @ rec(0))

    def best_response_value(self, br_player: int, opp: dict[int, np.ndarray]) -> float:
        """Value to ``br_player`` of a best response against the opponent's tables."""
        sign = 1.0 if br_player == 0 else -1.0

        def rec(i: int, opp_reach: np.ndarray) -> np.ndarray:
            n = self.nodes[i]
            if n.terminal:
                return sign * n.payoff
            if n.player == br_player:
                vals = np.stack([rec(c, opp_reach) for c in n.children], axis=1)
                score = n.members @ (vals * (opp_reach * self.chance)[:, None])
                best = np.argmax(score, axis=1)
                return vals[np.arange(self.n_deals), best[n.local]]
            sigma = opp[i][n.local]
            return sum(sigma[:, a] * rec(c, opp_reach * sigma[:, a]) for a, c in enumerate(n.children))

        return float(self.chance @ rec(0, np.ones(self.n_deals)))

    def exploitability(self, t0: dict[int, np.ndarray], t1: dict[int, np.ndarray]) -> float:
        """Mean best-response gain over the two seats, in chips."""
        return 0.5 * (self.best_response_value(0, t1) + self.best_response_value(1, t0))


def exploitability(pair: Sequence[BehaviorPolicy], game: GameId | str = GameId.KUHN,
                   tree: Optional[PokerTree] = None) -> float:
    game = GameId(game)
    if game not in (GameId.KUHN, GameId.LEDUC):
        raise ValueError(f"exploitability is defined for zero-sum poker games, not {game}")
    tree = tree or PokerTree(game)
    return tree.exploitability(tree.tables(pair[0]), tree.tables(pair[1]))


# -- CFR ------------------------------------------------------------------------------


def regret_matching(regrets: np.ndarray) -> np.ndarray:
    """Rows proportional to positive regret; uniform where no regret is positive."""
    pos = np.maximum(regrets, 0.0)
    s = pos.sum(axis=1, keepdims=True)
    uniform = np.full_like(regrets, 1.0 / regrets.shape[1])
    return np.where(s > 0, pos / np.where(s > 0, s, 1.0), uniform)


@dataclass
class CfrState:
    regrets: dict[int, np.ndarray]
    strategy_sum: dict[int, np.ndarray]
    iteration: int = 0

    def average(self) -> dict[int, np.ndarray]:
        out = {}
        for i, s in self.strategy_sum.items():
            tot = s.sum(axis=1, keepdims=True)
            out[i] = np.where(tot > 0, s / np.where(tot > 0, tot, 1.0), 1.0 / s.shape[1])
        return out

    def current(self) -> dict[int, np.ndarray]:
        return {i: regret_matching(r) for i, r in self.regrets.items()}


class CFRSolver:
    """Vanilla CFR with simultaneous regret updates over the full public tree."""

    def __init__(self, game: GameId | str):
        self.tree = PokerTree(game)
        shapes = {i: (len(self.tree.nodes[i].keys), len(self.tree.nodes[i].actions)) for i in self.tree.decision_nodes}
        self.state = CfrState({i: np.zeros(s) for i, s in shapes.items()},
                              {i: np.zeros(s) for i, s in shapes.items()})

    def iterate(self) -> None:
        tree, st = self.tree, self.state
        chance = tree.chance

        def rec(i: int, reach0: np.ndarray, reach1: np.ndarray) -> np.ndarray:
            n = tree.nodes[i]
            if n.terminal:
                return n.payoff
            sigma = regret_matching(st.regrets[i])[n.local]
            p = n.player
            vals = np.empty((tree.n_deals, len(n.children)))
            for a, c in enumerate(n.children):
                if p == 0:
                    vals[:, a] = rec(c, reach0 * sigma[:, a], reach1)
                else:
                    vals[:, a] = rec(c, reach0, reach1 * sigma[:, a])
            v = np.einsum("da,da->d", sigma, vals)
            own, opp = (reach0, reach1) if p == 0 else (reach1, reach0)
            sign = 1.0 if p == 0 else -1.0
            st.regrets[i] += n.members @ (sign * (vals - v[:, None]) * (opp * chance)[:, None])
            st.strategy_sum[i] += n.members @ (own[:, None] * sigma)
            return v

        ones = np.ones(tree.n_deals)
        rec(0, ones, ones)
        st.iteration += 1

    def average_policy(self) -> tuple[BehaviorPolicy, BehaviorPolicy]:
        return self._split(self.state.average())

    def _split(self, tables: dict[int, np.ndarray]) -> tuple[BehaviorPolicy, BehaviorPolicy]:
        out = []
        for p in (0, 1):
            mine = {i: t for i, t in tables.items() if self.tree.nodes[i].player == p}
            out.append(self.tree.behavior_policy(mine))
        return out[0], out[1]

    def exploitability(self) -> float:
        avg = self.state.average()
        return self.tree.exploitability(avg, avg)


def log_schedule(iterations: int, per_decade: int = 4) -> list[int]:
    """Roughly log-spaced checkpoints in [1, iterations], always including the last."""
    pts = {iterations}
    if iterations > 1:
        n = int(math.ceil(math.log10(iterations) * per_decade))
        for j in range(n + 1):
            pts.add(max(1, min(iterations, int(round(10 ** (j / per_decade))))))
    return sorted(pts)


def cfr_solve(game: GameId | str, iterations: int, seed: int = 0, interval: Optional[int] = None,
              schedule: Optional[Sequence[int]] = None):
    """Run CFR; returns ``(policy pair, [(iteration, exploitability), ...])``.

    Exploitability is recorded every ``interval`` iterations, or at the
    iterations listed in ``schedule`` (default: log-spaced).  Vanilla CFR is
    deterministic, so ``seed`` only exists for interface symmetry.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    solver = CFRSolver(game)
    marks = set(range(interval, iterations + 1, interval)) if interval else set(schedule or log_schedule(iterations))
    trace = []
    for it in range(1, iterations + 1):
        solver.iterate()
        if it in marks:
            trace.append((it, solver.exploitability()))
    return solver.average_policy(), trace
