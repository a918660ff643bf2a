"""Group-relative advantage estimators.

Four schemes share one entry point, :func:`agent_specific_advantage`:

``naive``
    trajectory-level GRPO, z-scored episode returns, objective averaged over
    all tokens of a trajectory.
``naive_multi``
    same advantages, objective averaged turn-by-turn.
``process_supervision``
    z-score every turn reward over the pooled batch, then suffix-sum.
``mars``
    suffix-sum first (Monte Carlo return from each turn), then subtract the
    mean of every return in the (sub)group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .rollout import ConfigError, Group

SCHEMES = ("naive", "naive_multi", "process_supervision", "mars")
EPS_STD = 1e-8

Rewards = Sequence[Sequence[float]]


def check_rewards(rewards: Rewards, min_trajectories: int = 2) -> list[np.ndarray]:
    """Validate a batch of per-turn reward lists, sklearn ``check_array`` style."""
    out = [np.asarray(r, dtype=float).reshape(-1) for r in rewards]
    if len(out) < min_trajectories:
        raise ConfigError(f"need at least {min_trajectories} trajectories, got {len(out)}")
    for r in out:
        if not np.all(np.isfinite(r)):
            raise ValueError("rewards must be finite")
    return out


def suffix_sums(r: np.ndarray) -> np.ndarray:
    """``R_k = sum_{j >= k} r_j``."""
    return np.cumsum(r[::-1])[::-1].copy()


def naive_group_advantage(returns: Sequence[float], eps: float = EPS_STD) -> np.ndarray:
    r = np.asarray(returns, dtype=float)
    if r.size < 2:
        raise ConfigError("naive advantage needs at least 2 returns")
    return (r - r.mean()) / max(r.std(), eps)


def process_supervision_advantage(rewards: Rewards, eps: float = EPS_STD) -> list[np.ndarray]:
    """Normalize every turn reward over the pooled batch, then suffix-sum per trajectory."""
    rs = check_rewards(rewards, min_trajectories=1)
    pooled = np.concatenate(rs) if rs else np.zeros(0)
    if pooled.size < 2:
        raise ConfigError("process supervision needs at least 2 turn rewards")
    std = pooled.std()
    if std < eps:
        return [np.zeros_like(r) for r in rs]
    return [suffix_sums((r - pooled.mean()) / std) for r in rs]


def gae(rewards: np.ndarray, values: np.ndarray, gamma: float = 1.0, lam: float = 1.0) -> np.ndarray:
    """Generalized advantage estimation for one episode; the value after the last turn is 0."""
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    adv = np.zeros_like(rewards)
    running = 0.0
    next_value = 0.0
    for k in range(len(rewards) - 1, -1, -1):
        delta = rewards[k] + gamma * next_value - values[k]
        running = delta + gamma * lam * running
        adv[k] = running
        next_value = values[k]
    return adv


def return_table(rewards: Rewards) -> list[np.ndarray]:
    return [suffix_sums(r) for r in check_rewards(rewards, min_trajectories=1)]


def mars_turn_advantage(rewards: Rewards, lam: float = 1.0, baseline: str = "pooled") -> list[np.ndarray]:
    """Sum-then-normalize advantages for one subgroup.

    ``baseline="pooled"`` subtracts the mean of every cumulative return in the
    subgroup (all trajectories, all turns, each turn weighted equally);
    ``"per_turn"`` subtracts the mean over trajectories at the same turn index.
    With ``lam != 1`` the pooled mean serves as a constant value function in GAE.
    """
    rs = check_rewards(rewards)
    returns = [suffix_sums(r) for r in rs]
    nonempty = [R for R in returns if R.size]
    if not nonempty:
        return returns
    if baseline == "pooled":
        mean = float(np.concatenate(nonempty).mean())
        if lam == 1.0:
            return [R - mean for R in returns]
        return [gae(r, np.full(r.size, mean), 1.0, lam) for r in rs]
    if baseline == "per_turn":
        depth = max(R.size for R in returns)
        means = np.array([np.mean([R[k] for R in returns if R.size > k]) for k in range(depth)])
        return [R - means[: R.size] for R in returns]
    raise ValueError(f"unknown baseline {baseline!r}")


@dataclass
class AdvantageAssignment:
    """Per-turn scalar advantages for each trajectory of a group."""

    scheme: str
    turn_advantages: list[np.ndarray]
    subgroup: list[int]

    def token_advantages(self, i: int, token_counts: Sequence[int]) -> list[np.ndarray]:
        """Broadcast trajectory ``i``'s turn advantages to that turn's tokens."""
        return [np.full(n, a) for a, n in zip(self.turn_advantages[i], token_counts)]


def _scheme_advantages(rewards: list[list[float]], scheme: str, lam: float, baseline: str) -> list[np.ndarray]:
    if scheme in ("naive", "naive_multi"):
        check_rewards(rewards)
        keep = [i for i, r in enumerate(rewards) if len(r)]
        adv = naive_group_advantage([sum(rewards[i]) for i in keep]) if len(keep) >= 2 else np.zeros(len(keep))
        out = [np.zeros(len(r)) for r in rewards]
        for a, i in zip(adv, keep):
            out[i] = np.full(len(rewards[i]), a)
        return out
    if scheme == "process_supervision":
        return process_supervision_advantage(rewards)
    if scheme == "mars":
        return mars_turn_advantage(rewards, lam=lam, baseline=baseline)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def agent_specific_advantage(
    group: Group,
    scheme: str = "mars",
    agent_specific: bool = True,
    lam: float = 1.0,
    baseline: str = "pooled",
) -> AdvantageAssignment:
    """Apply ``scheme`` within each seat's subgroup, or to the pooled group when ``agent_specific`` is off."""
    rewards = [t.rewards for t in group.trajectories]
    seats = [t.player for t in group.trajectories]
    out: list[np.ndarray] = [np.zeros(0)] * len(rewards)
    parts = group.subgroups.values() if agent_specific else [list(range(len(rewards)))]
    for idx in parts:
        adv = _scheme_advantages([rewards[i] for i in idx], scheme, lam, baseline)
        for i, a in zip(idx, adv):
            out[i] = a
    return AdvantageAssignment(scheme, out, seats)


class TurnAdvantageEstimator(TransformerMixin, BaseEstimator):
    """Estimator wrapper mapping a list of groups to their advantage assignments."""

    def __init__(self, scheme: str = "mars", agent_specific: bool = True, lam: float = 1.0,
                 baseline: str = "pooled"):
        self.scheme = scheme
        self.agent_specific = agent_specific
        self.lam = lam
        self.baseline = baseline

    def fit(self, groups: Sequence[Group], y=None):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.baseline not in ("pooled", "per_turn"):
            raise ValueError(f"unknown baseline {self.baseline!r}")
        self.n_groups_ = len(groups)
        return self

    def transform(self, groups: Sequence[Group]) -> list[AdvantageAssignment]:
        return [agent_specific_advantage(g, self.scheme, self.agent_specific, self.lam, self.baseline)
                for g in groups]
