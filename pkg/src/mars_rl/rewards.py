"""Per-turn training reward: scaled game reward + format term + length term."""

from __future__ import annotations

from dataclasses import dataclass, field

from .games import GameId

DEFAULT_SCALES = {g.value: (2.0 if g == GameId.TICTACTOE else 1.0) for g in GameId}


@dataclass(frozen=True)
class RewardConfig:
    scales: dict = field(default_factory=lambda: dict(DEFAULT_SCALES))
    format_valid_bonus: float = 0.05
    format_invalid_penalty: float = -10.0
    length_alpha: float = 0.5
    length_min: int = 11
    length_max: int = 2048

    def __post_init__(self):
        if not self.length_min < self.length_max:
            raise ValueError("length_min must be < length_max")
        if self.length_alpha < 0:
            raise ValueError("length_alpha must be >= 0")
        if any(v <= 0 for v in self.scales.values()):
            raise ValueError("reward scale factors must be > 0")

    def scale(self, game: GameId | str) -> float:
        return float(self.scales.get(GameId(game).value, 1.0))


@dataclass(frozen=True)
class RewardBreakdown:
    game: float
    format: float
    length: float
    total: float
    terminate: bool = False


def length_reward(length: int, cfg: RewardConfig = RewardConfig()) -> float:
    """Conciseness bonus, linear from ``alpha`` at ``length_min`` to 0 at ``length_max``.

    Clamped to ``[0, alpha]`` so responses shorter than ``length_min`` earn no
    more than ``alpha``.
    """
    frac = 1.0 - (length - cfg.length_min) / (cfg.length_max - cfg.length_min)
    return cfg.length_alpha * min(1.0, max(0.0, frac))


def compose_turn_reward(
    game_reward: float,
    game: GameId | str,
    valid: bool,
    length: int,
    cfg: RewardConfig = RewardConfig(),
) -> RewardBreakdown:
    g = game_reward * cfg.scale(game)
    f = cfg.format_valid_bonus if valid else cfg.format_invalid_penalty
    ln = length_reward(length, cfg)
    return RewardBreakdown(g, f, ln, g + f + ln, terminate=not valid)
