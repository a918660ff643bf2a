import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import make_group, random_batch
from mars_rl.advantage import (
    TurnAdvantageEstimator,
    agent_specific_advantage,
    gae,
    mars_turn_advantage,
    naive_group_advantage,
    process_supervision_advantage,
    suffix_sums,
)
from mars_rl.rollout import ConfigError

batches = st.integers(0, 2**32 - 1).map(lambda s: random_batch(np.random.default_rng(s)))


def test_naive_two_returns():
    np.testing.assert_allclose(naive_group_advantage([1, -1]), [1, -1])


def test_naive_constant_returns_are_zero():
    np.testing.assert_allclose(naive_group_advantage([3, 3, 3]), [0, 0, 0])


def test_naive_one_winner_of_four():
    s = math.sqrt(3)
    np.testing.assert_allclose(naive_group_advantage([4, 0, 0, 0]), [3 / s, -1 / s, -1 / s, -1 / s])


def test_naive_needs_two_returns():
    with pytest.raises(ConfigError):
        naive_group_advantage([1.0])


def test_mars_two_turn_example():
    out = mars_turn_advantage([[0, 1], [0, 0]])
    np.testing.assert_allclose(out[0], [0.5, 0.5])
    np.testing.assert_allclose(out[1], [-0.5, -0.5])


def test_mars_single_turn_is_centered_return():
    out = mars_turn_advantage([[2], [0]])
    np.testing.assert_allclose(np.concatenate(out), [1, -1])


def test_suffix_sums():
    np.testing.assert_allclose(suffix_sums(np.array([1.0, 2.0, 3.0])), [6, 5, 3])


@given(batches)
def test_mars_advantages_have_zero_pooled_mean(batch):
    out = mars_turn_advantage(batch)
    assert abs(np.concatenate(out).mean()) <= 1e-9 * max(1.0, np.abs(np.concatenate(out)).max())


@given(batches)
def test_mars_equals_gae_with_constant_mean_value(batch):
    mean = np.concatenate([suffix_sums(np.asarray(r)) for r in batch]).mean()
    want = [gae(np.asarray(r), np.full(len(r), mean), 1.0, 1.0) for r in batch]
    for a, b in zip(mars_turn_advantage(batch), want):
        np.testing.assert_allclose(a, b, atol=1e-9)


@given(batches, st.floats(-10, 10))
def test_mars_is_shift_invariant_in_terminal_reward(batch, c):
    shifted = [list(r[:-1]) + [r[-1] + c] for r in batch]
    for a, b in zip(mars_turn_advantage(batch), mars_turn_advantage(shifted)):
        np.testing.assert_allclose(a, b, atol=1e-8)


@given(batches, st.floats(0.0, 1.0))
def test_mars_lambda_matches_gae(batch, lam):
    mean = np.concatenate([suffix_sums(np.asarray(r)) for r in batch]).mean()
    for r, a in zip(batch, mars_turn_advantage(batch, lam=lam)):
        np.testing.assert_allclose(a, gae(np.asarray(r), np.full(len(r), mean), 1.0, lam), atol=1e-9)


def test_process_supervision_is_biased_where_mars_is_not():
    batch = [[0, 0, 0, 1], [0]]
    ps = np.concatenate(process_supervision_advantage(batch))
    assert ps.mean() == pytest.approx(0.9, abs=1e-12)
    assert np.concatenate(mars_turn_advantage(batch)).mean() == pytest.approx(0.0, abs=1e-12)


def test_per_turn_baseline_centers_each_turn_index():
    out = mars_turn_advantage([[1, 2], [3, 0], [0]], baseline="per_turn")
    np.testing.assert_allclose([out[0][0], out[1][0], out[2][0]], np.array([3, 3, 0]) - 2)
    np.testing.assert_allclose([out[0][1], out[1][1]], [1, -1])


def test_non_finite_rewards_rejected():
    with pytest.raises(ValueError):
        mars_turn_advantage([[np.nan], [0.0]])


def test_agent_specific_subgroups_compare_like_with_like():
    # seat 0 wins 2 or nothing, seat 1 loses 2 or nothing
    group = make_group([[2], [0], [-2], [0]], seats=[0, 0, 1, 1])
    spec = agent_specific_advantage(group, "mars", agent_specific=True)
    np.testing.assert_allclose(np.concatenate(spec.turn_advantages), [1, -1, -1, 1])
    pooled = agent_specific_advantage(group, "mars", agent_specific=False)
    np.testing.assert_allclose(np.concatenate(pooled.turn_advantages)[2:], [-2, 0])
    assert spec.subgroup == [0, 0, 1, 1]


def test_naive_schemes_broadcast_one_advantage_per_trajectory():
    group = make_group([[0, 1], [0, 0], [1], [0]], seats=[0, 0, 1, 1])
    for scheme in ("naive", "naive_multi"):
        a = agent_specific_advantage(group, scheme).turn_advantages
        np.testing.assert_allclose(a[0], [1, 1])
        np.testing.assert_allclose(a[1], [-1, -1])


def test_token_broadcast():
    group = make_group([[1], [0]], seats=[0, 0])
    a = agent_specific_advantage(group, "mars")
    toks = a.token_advantages(0, [3])
    np.testing.assert_allclose(toks[0], [0.5, 0.5, 0.5])


def test_turn_advantage_estimator_transform():
    groups = [make_group([[2], [0], [-2], [0]], seats=[0, 0, 1, 1])]
    est = TurnAdvantageEstimator(scheme="mars")
    out = est.fit_transform(groups)
    assert est.n_groups_ == 1
    np.testing.assert_allclose(np.concatenate(out[0].turn_advantages), [1, -1, -1, 1])


def test_turn_advantage_estimator_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        TurnAdvantageEstimator(scheme="bogus").fit([])
