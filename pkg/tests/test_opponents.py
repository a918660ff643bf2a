from fractions import Fraction

import numpy as np
import pytest

from helpers import kuhn_expectation, ttt_minimax
from mars_rl.games import KuhnState, TicTacToeState, init_game
from mars_rl.harness.specs import OpponentSpecError, is_exact, make_opponent
from mars_rl.opponents import (
    BehaviorAgent,
    BehaviorPolicy,
    MctsAgent,
    PokerTree,
    UniformAgent,
    cfr_solve,
    evaluate_matchup,
    exact_poker_matchup,
    exploitability,
    kuhn_nash_policy,
    mcts_act,
    mcts_search,
    regret_matching,
)
from mars_rl.policy import TabularPolicy, decision_key

KUHN_VALUE = -1 / 18


def play(state, moves):
    for m in moves:
        state = state.apply(m).state
    return state


# -- mcts ---------------------------------------------------------------------------------


def test_mcts_takes_an_immediate_win():
    s = play(TicTacToeState(), ["<X(0,0)>", "<O(1,0)>", "<X(0,1)>", "<O(1,1)>"])
    assert mcts_act(s, 200, seed=0) == "<X(0,2)>"


def test_mcts_blocks_an_immediate_loss():
    s = play(TicTacToeState(), ["<X(0,0)>", "<O(1,1)>", "<X(0,1)>"])
    assert mcts_act(s, 400, seed=0) == "<O(0,2)>"


def test_mcts_is_deterministic_in_seed():
    s = TicTacToeState()
    assert mcts_search(s, 50, seed=3).visits == mcts_search(s, 50, seed=3).visits


def test_mcts_rejects_imperfect_information():
    with pytest.raises(ValueError):
        mcts_search(init_game("kuhn", 0), 10)
    with pytest.raises(OpponentSpecError):
        make_opponent("mcts:10", "leduc")


def test_mcts_never_loses_tictactoe_to_uniform():
    rep = evaluate_matchup(MctsAgent(100), UniformAgent(), "tictactoe", 20)
    assert min(rep.seat0_mean, rep.seat1_mean) >= 0
    assert ttt_minimax(TicTacToeState()) == 0.0


# -- kuhn equilibria ------------------------------------------------------------------------


@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1, 6), Fraction(1, 3)])
def test_kuhn_nash_family_is_unexploitable(alpha):
    pair = kuhn_nash_policy(alpha)
    for p in pair:
        p.validate()
    assert exploitability(pair, "kuhn") <= 1e-9
    tree = PokerTree("kuhn")
    assert tree.expected_value(tree.tables(pair[0]), tree.tables(pair[1])) == pytest.approx(KUHN_VALUE, abs=1e-12)


def test_kuhn_nash_alpha_out_of_range():
    with pytest.raises(ValueError):
        kuhn_nash_policy(Fraction(1, 2))


def test_tree_sizes():
    assert PokerTree("kuhn").n_infosets == 12
    assert PokerTree("leduc").n_infosets == 288


def test_cfr_converges_on_kuhn():
    pair, trace = cfr_solve("kuhn", 2000)
    iters, expl = zip(*trace)
    assert iters[-1] == 2000
    assert expl[-1] < 0.01 and expl[-1] < expl[0]
    tree = PokerTree("kuhn")
    assert tree.expected_value(tree.tables(pair[0]), tree.tables(pair[1])) == pytest.approx(KUHN_VALUE, abs=5e-3)


def test_cfr_improves_on_leduc():
    _, trace = cfr_solve("leduc", 50, schedule=[1, 50])
    assert trace[1][1] < trace[0][1]


def test_regret_matching_rows():
    out = regret_matching(np.array([[1.0, 3.0], [-1.0, -2.0]]))
    np.testing.assert_allclose(out, [[0.25, 0.75], [0.5, 0.5]])


# -- exact matchups --------------------------------------------------------------------------


def bet_prob(agent, seat):
    def f(card, history):
        cards = (card, (card + 1) % 3) if seat == 0 else ((card + 1) % 3, card)
        s = play(KuhnState(cards=cards), ["<BET>" if c == "b" else "<PASS>" for c in history])
        return agent.state_action_probs(s)["<BET>"]
    return f


def random_tabular(seed):
    pol = TabularPolicy(temperature=0.6)
    rng = np.random.default_rng(seed)
    for cards in KuhnState.deals():
        for h in ["", "p", "b", "pb"]:
            s = play(KuhnState(cards=cards), ["<BET>" if c == "b" else "<PASS>" for c in h])
            pol.ensure(decision_key(s.observe(s.player)), tuple(s.legal_actions()))[:] = rng.normal(size=2)
    return pol


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_exact_matchup_agrees_with_brute_force(seed):
    learner = random_tabular(seed)
    ne = make_opponent("kuhn_nash:1/6", "kuhn")
    s0, s1 = exact_poker_matchup(learner, ne, "kuhn")
    assert s0 == pytest.approx(kuhn_expectation(bet_prob(learner, 0), bet_prob(ne, 1)), abs=1e-12)
    assert s1 == pytest.approx(-kuhn_expectation(bet_prob(ne, 0), bet_prob(learner, 1)), abs=1e-12)


def test_uniform_against_equilibrium():
    s0, s1 = exact_poker_matchup(TabularPolicy(), make_opponent("kuhn_nash", "kuhn"), "kuhn")
    assert (s0, s1) == (pytest.approx(-1 / 6), pytest.approx(-1 / 9))


def test_sampled_matchup_brackets_exact_value():
    pol, ne = TabularPolicy(temperature=0.6), make_opponent("kuhn_nash", "kuhn")
    rep = evaluate_matchup(pol, ne, "kuhn", 4000, base_seed=7)
    exact = np.mean(exact_poker_matchup(pol, ne, "kuhn"))
    assert abs(rep.mean - exact) <= rep.ci95 * 1.5
    assert rep.n_games == 4000 and rep.format_violations == 0


def test_evaluate_needs_even_games():
    with pytest.raises(ValueError):
        evaluate_matchup(UniformAgent(), UniformAgent(), "kuhn", 3)


# -- behavior policies and specs ---------------------------------------------------------------


def test_behavior_policy_text_round_trip(tmp_path):
    pair, _ = cfr_solve("leduc", 5, schedule=[5])
    pol = BehaviorPolicy({**pair[0].table, **pair[1].table})
    path = tmp_path / "p.txt"
    pol.save(path)
    back = BehaviorPolicy.load(path)
    assert set(back.table) == set(pol.table)
    for k in pol.table:
        for a, p in pol.table[k].items():
            assert back.table[k][a] == pytest.approx(p, abs=1e-11)
    back.validate()


def test_cfr_file_spec(tmp_path):
    path = tmp_path / "kuhn.txt"
    BehaviorPolicy({**kuhn_nash_policy()[0].table, **kuhn_nash_policy()[1].table}).save(path)
    agent = make_opponent(f"cfr:{path}", "kuhn")
    assert isinstance(agent, BehaviorAgent)
    s0, s1 = exact_poker_matchup(agent, make_opponent("kuhn_nash", "kuhn"), "kuhn")
    assert s0 == pytest.approx(KUHN_VALUE, abs=1e-9) and s1 == pytest.approx(-KUHN_VALUE, abs=1e-9)


@pytest.mark.parametrize("spec, game", [("bogus", "kuhn"), ("kuhn_nash:1/2", "kuhn"), ("kuhn_nash", "leduc"),
                                        ("cfr", "tictactoe"), ("cfr:/no/such/file", "kuhn"), ("self", "kuhn"),
                                        ("mcts:x", "tictactoe")])
def test_bad_specs(spec, game):
    with pytest.raises(OpponentSpecError):
        make_opponent(spec, game)


def test_exactness():
    assert is_exact("kuhn_nash", "kuhn") and is_exact("cfr", "leduc")
    assert not is_exact("mcts:10", "tictactoe") and not is_exact("self", "mini_hanabi")
