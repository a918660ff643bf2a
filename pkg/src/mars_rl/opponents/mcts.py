"""UCT Monte Carlo tree search with uniform random rollouts."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..games import GameState, format_answer
from ..policy import Emission


@dataclass
class _Node:
    state: GameState
    parent: Optional["_Node"] = None
    action: Optional[str] = None
    mover: int = -1  # player whose move led here
    untried: list[str] = field(default_factory=list)
    children: list["_Node"] = field(default_factory=list)
    visits: int = 0
    value: float = 0.0
    rewards: tuple[float, float] = (0.0, 0.0)  # rewards on the move into this node


@dataclass
class SearchResult:
    action: str
    visits: dict[str, int]
    values: dict[str, float]


def mcts_search(state: GameState, simulations: int, c_uct: float = math.sqrt(2), seed: int = 0) -> SearchResult:
    if not state.game.is_perfect_information:
        raise ValueError(f"MCTS needs a perfect-information game, got {state.game}")
    legal = state.legal_actions()
    if len(legal) == 1:
        return SearchResult(legal[0], {legal[0]: 0}, {legal[0]: 0.0})
    rng = random.Random(seed)
    root = _Node(state, untried=list(legal))
    for _ in range(simulations):
        node = root
        while not node.untried and node.children:
            log_n = math.log(node.visits)
            node = max(node.children,
                       key=lambda ch: ch.value / ch.visits + c_uct * math.sqrt(log_n / ch.visits))
        if node.untried:
            a = node.untried.pop(rng.randrange(len(node.untried)))
            out = node.state.apply(a)
            child = _Node(out.state, node, a, node.state.player,
                          [] if out.terminal else out.state.legal_actions(), rewards=out.rewards)
            node.children.append(child)
            node = child
        rewards = _rollout(node, rng)
        while node is not None:
            node.visits += 1
            if node.mover >= 0:
                node.value += rewards[node.mover]
            node = node.parent
    order = {a: i for i, a in enumerate(legal)}
    best = max(root.children, key=lambda ch: (ch.visits, -order[ch.action]))
    return SearchResult(best.action,
                        {ch.action: ch.visits for ch in root.children},
                        {ch.action: ch.value / ch.visits for ch in root.children})


def _rollout(node: _Node, rng: random.Random) -> tuple[float, float]:
    state = node.state
    if state.terminal:
        return node.rewards
    total = [0.0, 0.0]
    while not state.terminal:
        legal = state.legal_actions()
        out = state.apply(legal[rng.randrange(len(legal))])
        total[0] += out.rewards[0]
        total[1] += out.rewards[1]
        state = out.state
    return total[0], total[1]


def mcts_act(state: GameState, simulations: int, c_uct: float = math.sqrt(2), seed: int = 0) -> str:
    return mcts_search(state, simulations, c_uct, seed).action


@dataclass(frozen=True)
class MctsAgent:
    simulations: int = 100
    c_uct: float = math.sqrt(2)

    def act(self, state: GameState, rng: np.random.Generator) -> Emission:
        seed = int(rng.integers(2**63 - 1))
        action = mcts_act(state, self.simulations, self.c_uct, seed)
        return Emission(format_answer(action), (action,), (0.0,))
