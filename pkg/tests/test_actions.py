import pytest
from hypothesis import given, strategies as st

from mars_rl.games import GameId, ParseFailure, canonicalize, format_answer, init_game, parse_action

GAMES = [g.value for g in GameId]


@pytest.mark.parametrize("game", GAMES)
@given(seed=st.integers(0, 10**6), pick=st.integers(0, 1000))
def test_legal_actions_round_trip_through_answer_tags(game, seed, pick):
    s = init_game(game, seed)
    legal = s.legal_actions()
    a = legal[pick % len(legal)]
    assert canonicalize(game, a) == a
    assert parse_action(game, "thinking...\n" + format_answer(a), s) == a


def test_last_answer_span_wins():
    raw = "<answer><PASS></answer> on reflection <answer><BET></answer>"
    assert parse_action("kuhn", raw) == "<BET>"


def test_whitespace_and_card_case_are_tolerated():
    assert parse_action("tictactoe", "<answer>< X ( 1 , 2 ) ></answer>") == "<X(1,2)>"
    assert parse_action("mini_hanabi", "<answer><Discard Card 0></answer>") == "<Discard card 0>"


@pytest.mark.parametrize("raw, failure", [
    ("<PASS>", ParseFailure.NO_ANSWER_TAG),
    ("<answer>pass</answer>", ParseFailure.MALFORMED),
    ("<answer><PASS> <BET></answer>", ParseFailure.MALFORMED),
    ("<answer><FOLD></answer>", ParseFailure.MALFORMED),
])
def test_kuhn_parse_failures(raw, failure):
    assert parse_action("kuhn", raw) == failure


def test_illegal_but_well_formed_action():
    s = init_game("tictactoe", 0).apply("<X(0,0)>").state
    assert parse_action("tictactoe", "<answer><O(0,0)></answer>", s) == ParseFailure.ILLEGAL
    assert parse_action("tictactoe", "<answer><X(1,1)></answer>", s) == ParseFailure.ILLEGAL
