"""Independent oracles shared by the test modules."""

from __future__ import annotations

from functools import lru_cache

from mars_rl.games import MINI_HANABI, HanabiState, KuhnState, TicTacToeState, init_game


@lru_cache(maxsize=None)
def ttt_minimax(state: TicTacToeState) -> float:
    """Value to the player about to move under perfect play."""
    best = -2.0
    for a in state.legal_actions():
        out = state.apply(a)
        v = out.rewards[state.player] if out.terminal else -ttt_minimax(out.state)
        best = max(best, v)
    return best


def kuhn_payoff(c0: int, c1: int, line: str) -> float:
    """Hand-written Kuhn payoff table, chips to player 0 (p = pass, b = bet)."""
    hi = 1.0 if c0 > c1 else -1.0
    return {"pp": hi, "bp": 1.0, "bb": 2 * hi, "pbp": -1.0, "pbb": 2 * hi}[line]


def kuhn_expectation(probs0, probs1) -> float:
    """Brute-force expected chips to player 0 by enumerating deals and betting lines.

    ``probsN(card, history)`` returns P(bet) for that seat.
    """
    total = 0.0
    deals = [(a, b) for a in range(3) for b in range(3) if a != b]
    for c0, c1 in deals:
        def rec(h: str) -> float:
            if h in ("pp", "bp", "bb", "pbp", "pbb"):
                return kuhn_payoff(c0, c1, h)
            mover = len(h) % 2
            pb = probs0(c0, h) if mover == 0 else probs1(c1, h)
            return pb * rec(h + "b") + (1 - pb) * rec(h + "p")
        total += rec("") / len(deals)
    return total


def hanabi_greedy(state: HanabiState) -> str:
    """Perfect-information greedy line: play a playable card, else discard a dead one, else hint."""
    p = state.player
    hand = state.hands[p]
    legal = state.legal_actions()
    for i, (c, r) in enumerate(hand):
        if state.stacks[c] == r - 1:
            return f"<Play card {i}>"
    for i, (c, r) in enumerate(hand):
        if state.stacks[c] >= r and f"<Discard card {i}>" in legal:
            return f"<Discard card {i}>"
    hints = [a for a in legal if a.startswith("<Reveal")]
    if hints:
        return hints[0]
    discards = [a for a in legal if a.startswith("<Discard")]
    return discards[0] if discards else legal[0]


def hanabi_greedy_score(seed: int) -> int:
    s = init_game("mini_hanabi", seed)
    while not s.terminal:
        s = s.apply(hanabi_greedy(s)).state
    return s.score


__all__ = ["MINI_HANABI", "KuhnState", "hanabi_greedy", "hanabi_greedy_score", "kuhn_expectation", "kuhn_payoff",
           "make_group", "random_batch",
           "ttt_minimax"]


def random_batch(rng, max_traj: int = 16, max_len: int = 8):
    """Random per-turn rewards: 2..max_traj trajectories of 1..max_len turns in [-4, 4]."""
    n = int(rng.integers(2, max_traj + 1))
    return [list(rng.uniform(-4, 4, size=int(rng.integers(1, max_len + 1)))) for _ in range(n)]


def make_group(rewards_by_traj, seats, game="kuhn", tokens_per_turn=1):
    """A Group with hand-set turn rewards; every turn emits ``tokens_per_turn`` dummy tokens."""
    from mars_rl.games import GameId
    from mars_rl.policy import Emission
    from mars_rl.rewards import RewardBreakdown
    from mars_rl.rollout import Group, Trajectory, TurnRecord

    trajs = []
    for e, (rs, seat) in enumerate(zip(rewards_by_traj, seats)):
        turns = []
        for k, r in enumerate(rs, start=1):
            toks = tuple("a" for _ in range(tokens_per_turn))
            em = Emission("", toks, (0.0,) * tokens_per_turn, tuple((f"k{e}-{k}-{t}", ("a", "b"))
                                                                    for t in range(tokens_per_turn)))
            turns.append(TurnRecord(seat, k, "", em, "a", r, RewardBreakdown(r, 0.0, 0.0, r), k == len(rs)))
        trajs.append(Trajectory(e, GameId(game), seat, turns))
    return Group(GameId(game), "test", trajs)
