"""Scikit-learn style wrapper around the self-play training loop."""

from __future__ import annotations

from dataclasses import replace
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .games import GameId, GameState
from .harness.config import FIXED_OPPONENTS, ExperimentConfig
from .harness.specs import make_opponent
from .opponents import evaluate_matchup
from .policy import TabularPolicy
from .rollout import Group, collect_group, fixed_opponent_group
from .train import AdamState, StepResult, compute_advantages, train_step


def step_seed(seed: int, step: int, game_index: int) -> int:
    """Deterministic base seed for one game's group at one step."""
    return int(np.random.SeedSequence([seed, step, game_index]).generate_state(1, dtype=np.uint32)[0])


class MarsSelfPlay(BaseEstimator):
    """Tabular softmax policy trained by group-relative self-play.

    ``fit`` runs ``max_steps`` updates from scratch and ``partial_fit`` runs
    one more.  Any parameter left as ``None`` falls back to ``config`` (or to
    the :class:`ExperimentConfig` defaults).
    """

    def __init__(self, games: Optional[Sequence[str]] = None, group_size: Optional[int] = None,
                 max_steps: Optional[int] = None, scheme: Optional[str] = None,
                 agent_specific: Optional[bool] = None, opponent_mode: Optional[str] = None,
                 learning_rate: Optional[float] = None, seed: Optional[int] = None,
                 config: Optional[ExperimentConfig] = None):
        self.games = games
        self.group_size = group_size
        self.max_steps = max_steps
        self.scheme = scheme
        self.agent_specific = agent_specific
        self.opponent_mode = opponent_mode
        self.learning_rate = learning_rate
        self.seed = seed
        self.config = config

    def resolved_config(self) -> ExperimentConfig:
        base = self.config or ExperimentConfig()
        overrides = {k: v for k, v in self.get_params(deep=False).items() if k != "config" and v is not None}
        if "games" in overrides:
            overrides["games"] = tuple(overrides["games"])
        cfg = replace(base, **overrides)
        cfg.validate()
        return cfg

    # -- training ------------------------------------------------------------------

    def reset(self) -> "MarsSelfPlay":
        """Fresh uniform policy, optimizer state and step counter."""
        cfg = self.resolved_config()
        self.config_ = cfg
        self.policy_ = TabularPolicy(multi_token=cfg.multi_token, temperature=cfg.sampling_temperature,
                                     top_p=cfg.top_p, top_k=cfg.top_k)
        self.reference_ = self.policy_.copy()
        self.adam_ = AdamState()
        self.step_ = 0
        self.history_: list[dict] = []
        self._opponents: dict[str, object] = {}
        return self

    def restore(self, policy: TabularPolicy, adam: AdamState, step: int, reference: TabularPolicy) -> "MarsSelfPlay":
        """Resume from checkpointed state."""
        self.reset()
        self.policy_, self.adam_, self.step_, self.reference_ = policy, adam, step, reference
        return self

    def _opponent(self, game: str):
        if game not in self._opponents:
            self._opponents[game] = make_opponent(FIXED_OPPONENTS[game], game,
                                                  cfr_iterations=self.config_.cfr_iterations)
        return self._opponents[game]

    def collect(self, step: int) -> list[Group]:
        cfg = self.config_
        rcfg = cfg.reward_config()
        groups = []
        for gi, game in enumerate(cfg.games):
            base = step_seed(cfg.seed, step, gi)
            if cfg.opponent_mode == "fixed_opponent":
                groups.append(fixed_opponent_group(game, self.policy_, self._opponent(game), cfg.group_size, base,
                                                   rcfg, cfg.group_shares_deal))
            else:
                groups.append(collect_group(game, self.policy_, cfg.group_size, base, rcfg, cfg.group_shares_deal))
        return groups

    def partial_fit(self, X=None, y=None) -> "MarsSelfPlay":
        if not hasattr(self, "policy_"):
            self.reset()
        self.last_step_ = self._step()
        return self

    def _step(self) -> tuple[StepResult, list[Group]]:
        cfg = self.config_
        step = self.step_ + 1
        groups = self.collect(step)
        adv = compute_advantages(groups, cfg.scheme, cfg.agent_specific, cfg.lambd, cfg.baseline)
        res = train_step(self.policy_, groups, adv, cfg.optim_config(), step, self.adam_, self.reference_)
        self.policy_ = res.policy
        self.step_ = step
        self.history_.append(res.metrics)
        return res, groups

    def fit(self, X=None, y=None) -> "MarsSelfPlay":
        """Train from scratch; ``X`` may list the games to train on."""
        if X is not None:
            self.games = list(X)
        self.reset()
        while self.step_ < self.config_.max_steps:
            self.partial_fit()
        return self

    # -- inference -----------------------------------------------------------------

    def _check_fitted(self):
        if not hasattr(self, "policy_"):
            raise NotFittedError("call fit or partial_fit first")

    def predict_proba(self, states: Sequence[GameState]) -> list[dict[str, float]]:
        self._check_fitted()
        return [self.policy_.state_action_probs(s) for s in states]

    def predict(self, states: Sequence[GameState]) -> list[str]:
        """Most likely action per state."""
        return [max(p, key=p.get) for p in self.predict_proba(states)]

    def score(self, X=None, y=None, n_games: Optional[int] = None) -> float:
        """Mean game return against each game's evaluation opponent, averaged over ``X`` (default: all games)."""
        self._check_fitted()
        cfg = self.config_
        games = list(X) if X is not None else list(cfg.games)
        vals = []
        for game in games:
            opp = make_opponent(cfg.eval_opponent(game), game, self.policy_, cfg.cfr_iterations)
            rep = evaluate_matchup(self.policy_, opp, GameId(game), n_games or cfg.eval_games,
                                   base_seed=step_seed(cfg.seed, 0, 10_000))
            vals.append(rep.mean)
        return float(np.mean(vals))


__all__ = ["MarsSelfPlay", "step_seed"]
