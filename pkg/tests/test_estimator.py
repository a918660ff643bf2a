import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mars_rl import MarsSelfPlay
from mars_rl.games import init_game
from mars_rl.harness.config import ExperimentConfig

FAST = ExperimentConfig(group_size=8, max_steps=5, eval_games=40, cfr_iterations=50, learning_rate=0.1)


def test_params_follow_sklearn_conventions():
    est = MarsSelfPlay(games=["kuhn"], group_size=8, seed=3)
    params = est.get_params()
    assert params["group_size"] == 8 and params["scheme"] is None
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(scheme="naive_multi")
    assert est.resolved_config().scheme == "naive_multi"


def test_explicit_params_override_config():
    cfg = MarsSelfPlay(config=FAST, max_steps=2, games=("tictactoe",)).resolved_config()
    assert (cfg.max_steps, cfg.games, cfg.group_size) == (2, ("tictactoe",), 8)


def test_invalid_params_raise_on_fit():
    with pytest.raises(ValueError):
        MarsSelfPlay(config=FAST, group_size=5).fit()


def test_unfitted_estimator_refuses_to_predict():
    with pytest.raises(NotFittedError):
        MarsSelfPlay().predict([init_game("kuhn", 0)])


def test_fit_predict_score():
    est = MarsSelfPlay(config=FAST).fit(["kuhn"])
    assert est.step_ == 5 and len(est.history_) == 5
    states = [init_game("kuhn", s) for s in range(3)]
    probs = est.predict_proba(states)
    assert all(sum(p.values()) == pytest.approx(1.0) for p in probs)
    assert est.predict(states) == [max(p, key=p.get) for p in probs]
    assert np.isfinite(est.score())


def test_partial_fit_continues_and_fit_restarts():
    est = MarsSelfPlay(config=FAST)
    est.partial_fit().partial_fit()
    assert est.step_ == 2
    est.fit()
    assert est.step_ == 5


def test_fit_is_deterministic():
    a = MarsSelfPlay(config=FAST).fit()
    b = MarsSelfPlay(config=FAST).fit()
    assert a.history_ == b.history_
    assert all(np.array_equal(a.policy_.logits[k], b.policy_.logits[k]) for k in a.policy_.logits)


def test_fixed_opponent_mode_trains():
    est = MarsSelfPlay(config=FAST, opponent_mode="fixed_opponent", max_steps=2).fit()
    assert est.step_ == 2
