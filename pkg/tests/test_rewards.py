import pytest

from mars_rl.rewards import RewardConfig, compose_turn_reward, length_reward


def test_length_reward_endpoints_are_exact():
    assert length_reward(11) == 0.5
    assert length_reward(2048) == 0.0


@pytest.mark.parametrize("length, expected", [(1, 0.5), (0, 0.5), (5000, 0.0)])
def test_length_reward_is_clamped(length, expected):
    assert length_reward(length) == expected


def test_length_reward_midpoint_is_linear():
    mid = (11 + 2048) / 2
    assert length_reward(mid) == pytest.approx(0.25, abs=1e-12)


def test_valid_turn_composition():
    bd = compose_turn_reward(1.0, "tictactoe", True, 1)
    assert (bd.game, bd.format, bd.length) == (2.0, 0.05, 0.5)
    assert bd.total == pytest.approx(2.55) and not bd.terminate


def test_invalid_turn_composition():
    bd = compose_turn_reward(0.0, "kuhn", False, 11)
    assert bd.format == -10.0 and bd.total == -9.5 and bd.terminate


def test_scales_are_configurable():
    cfg = RewardConfig(scales={"kuhn": 3.0})
    assert compose_turn_reward(-2.0, "kuhn", True, 2048, cfg).game == -6.0
    assert cfg.scale("leduc") == 1.0


@pytest.mark.parametrize("kwargs", [dict(length_min=10, length_max=10), dict(length_alpha=-1.0)])
def test_bad_reward_config_is_rejected(kwargs):
    with pytest.raises(ValueError):
        RewardConfig(**kwargs)
