import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import make_group
from mars_rl.advantage import agent_specific_advantage
from mars_rl.games import init_game
from mars_rl.objective import BatchCorruption, build_token_batch, surrogate, surrogate_objective, token_weights
from mars_rl.policy import Emission, TabularPolicy, kl_divergence
from mars_rl.rollout import collect_group


def trained_like_policy(seed, multi_token=False, scale=0.5, top_p=1.0):
    """Collect one group, then give every visited decision point random logits."""
    pol = TabularPolicy(multi_token=multi_token, temperature=0.6, top_p=top_p, top_k=0)
    rng = np.random.default_rng(seed)
    groups = [collect_group(game, pol, 8, seed) for game in ("kuhn", "tictactoe")]
    for g in groups:
        for t in g.trajectories:
            for turn in t.turns:
                for key, vocab in turn.emission.decisions:
                    pol.ensure(key, vocab)
    for key in pol.logits:
        pol.logits[key] = scale * rng.normal(size=len(pol.vocab[key]))
    return pol


def batch_for(pol, seed, scheme="mars"):
    groups = [collect_group(game, pol, 8, seed + 1) for game in ("kuhn", "tictactoe")]
    adv = [agent_specific_advantage(g, scheme) for g in groups]
    return build_token_batch(groups, adv, pol)


def objective_value(samples, pol, ref, **kw):
    return surrogate_objective(samples, pol, ref, **kw).value


@pytest.mark.parametrize("multi_token", [False, True])
@pytest.mark.parametrize("kl_coef", [0.0, 0.2])
def test_gradient_matches_finite_differences(multi_token, kl_coef):
    old = trained_like_policy(11, multi_token)
    samples = batch_for(old, 11)
    ref = TabularPolicy(multi_token=multi_token, temperature=0.6)
    rng = np.random.default_rng(0)
    new = old.copy()
    for smp in samples:
        new.ensure(smp.key, smp.vocab)
    for key in new.logits:  # stay inside the clip band so the objective is smooth
        new.logits[key] = new.logits[key] + 0.01 * rng.normal(size=len(new.logits[key]))
    kw = dict(clip_eps=0.2, dual_clip=3.0, kl_coef=kl_coef, entropy_coef=0.01)
    grad = surrogate_objective(samples, new, ref, **kw).grad
    h = 1e-5
    analytic, numeric = [], []
    keys = sorted(grad)
    keys = [keys[i] for i in sorted(rng.choice(len(keys), size=min(len(keys), 40), replace=False))]
    for key in keys:
        for j in range(len(grad[key])):
            plus, minus = new.copy(), new.copy()
            plus.logits[key] = plus.logits[key].copy()
            minus.logits[key] = minus.logits[key].copy()
            plus.logits[key][j] += h
            minus.logits[key][j] -= h
            numeric.append((objective_value(samples, plus, ref, **kw) - objective_value(samples, minus, ref, **kw))
                           / (2 * h))
            analytic.append(grad[key][j])
    analytic, numeric = np.array(analytic), np.array(numeric)
    rel = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(analytic), 1e-12)
    assert rel <= 1e-5


def test_clipped_token_has_zero_gradient():
    val, d = surrogate(1.5, 1.0, 0.2, 3.0)
    assert val == pytest.approx(1.2) and d == 0.0
    val, d = surrogate(0.5, -1.0, 0.2, 3.0)
    assert val == pytest.approx(-0.8) and d == 0.0


def test_dual_clip_bounds_negative_advantage():
    val, d = surrogate(10.0, -1.0, 0.2, 3.0)
    assert val == -3.0 and d == 0.0
    val, _ = surrogate(10.0, -1.0, 0.2, None)
    assert val == -10.0


@given(st.floats(-5, 5))
def test_ratio_one_gives_advantage(adv):
    val, d = surrogate(1.0, adv, 0.2, 3.0)
    assert val == pytest.approx(adv) and d == pytest.approx(adv)


def test_zero_advantage_at_reference_gives_zero_objective_and_gradient():
    pol = TabularPolicy(temperature=0.6)
    groups = [make_group([[0.0], [0.0], [0.0], [0.0]], seats=[0, 0, 1, 1])]
    adv = [agent_specific_advantage(g) for g in groups]
    samples = build_token_batch(groups, adv, pol)
    res = surrogate_objective(samples, pol, pol.copy())
    assert res.value == 0.0
    assert all(np.all(g == 0) for g in res.grad.values())


def test_turn_weights_do_not_depend_on_token_count():
    rewards, seats = [[1, 0], [0], [0, 0, 1], [1]], [0, 0, 1, 1]
    for tokens in (1, 5):
        w = token_weights(make_group(rewards, seats, tokens_per_turn=tokens), "mars")
        per_turn = [float(arr.sum()) for traj in w for arr in traj]
        assert per_turn == pytest.approx([1 / 8, 1 / 8, 1 / 4, 1 / 12, 1 / 12, 1 / 12, 1 / 4])
        assert sum(per_turn) == pytest.approx(1.0)


def test_naive_weights_average_over_all_tokens_of_a_trajectory():
    w = token_weights(make_group([[1, 0], [0], [1], [0]], [0, 0, 1, 1], tokens_per_turn=3), "naive")
    np.testing.assert_allclose(np.concatenate(w[0]), np.full(6, 1 / 24))
    np.testing.assert_allclose(np.concatenate(w[1]), np.full(3, 1 / 12))


@pytest.mark.parametrize("top_p", [0.5, 0.9])
def test_truncated_sampling_never_leaves_support_or_legal_set(top_p):
    pol = trained_like_policy(5, multi_token=True, scale=3.0, top_p=top_p)
    for seed in range(20):
        g = collect_group("tictactoe", pol, 4, seed)
        for t in g.trajectories:
            for turn in t.turns:
                assert turn.action is not None
                for tok, (key, vocab) in zip(turn.tokens, turn.emission.decisions):
                    assert pol.support(key, vocab)[vocab.index(tok)]
    s = init_game("tictactoe", 0)
    probs = pol.state_action_probs(s)
    assert set(probs) == set(s.legal_actions())
    assert sum(probs.values()) == pytest.approx(1.0)


@given(st.lists(st.floats(-4, 4), min_size=2, max_size=6))
def test_kl_to_uniform_reference_has_closed_form(z):
    pol, ref = TabularPolicy(temperature=0.5), TabularPolicy(temperature=0.5)
    vocab = tuple(f"t{i}" for i in range(len(z)))
    pol.ensure("k", vocab)[:] = z
    p = pol.full_probs("k", vocab)
    want = float(np.sum(p * np.log(p * len(z))))
    got = kl_divergence(pol, ref, [("k", vocab)])
    assert got == pytest.approx(want, abs=1e-12)
    assert got >= -1e-15


def test_objective_kl_term_matches_policy_kl():
    old = trained_like_policy(2)
    samples = batch_for(old, 2)
    ref = TabularPolicy(temperature=0.6)
    res = surrogate_objective(samples, old, ref, kl_coef=0.2)
    want = sum(s.weight * kl_divergence(old, ref, [(s.key, s.vocab)]) for s in samples)
    assert res.kl == pytest.approx(want, rel=1e-12)
    assert res.kl > 0


def test_token_outside_vocabulary_is_batch_corruption():
    g = make_group([[1.0], [0.0]], seats=[0, 0])
    turn = g.trajectories[0].turns[0]
    bad = Emission("", ("z",), (0.0,), turn.emission.decisions)
    g.trajectories[0].turns[0] = type(turn)(turn.player, turn.k, turn.observation, bad, turn.action,
                                            turn.game_reward, turn.reward, turn.terminal)
    with pytest.raises(BatchCorruption):
        build_token_batch([g], [agent_specific_advantage(g)], TabularPolicy())


def test_token_with_zero_behavior_probability_is_batch_corruption():
    g = make_group([[1.0], [0.0]], seats=[0, 0])
    pol = TabularPolicy(temperature=0.6, top_k=1)
    key, vocab = g.trajectories[0].turns[0].emission.decisions[0]
    pol.ensure(key, vocab)[:] = [-5.0, 5.0]  # "a" falls outside top-1
    with pytest.raises(BatchCorruption):
        build_token_batch([g], [agent_specific_advantage(g)], pol)
