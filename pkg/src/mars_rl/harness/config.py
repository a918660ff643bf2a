"""Flat ``key = value`` experiment configs.

Keys mirror the hyperparameter names used for LLM training where one
exists (``ppo_policy_clip``, ``kl_loss_coef``, ``warmup_steps``...).  Lines
starting with ``#`` are comments.  Every error names the file and line.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from ..advantage import SCHEMES
from ..games import GameId
from ..rewards import DEFAULT_SCALES, RewardConfig
from ..train import OptimConfig

GENERALIST_GAMES = ("tictactoe", "kuhn", "mini_hanabi")

# fixed-opponent training partner per game
FIXED_OPPONENTS = {"tictactoe": "mcts:100", "connect4": "mcts:100", "kuhn": "kuhn_nash:1/6", "leduc": "cfr"}

DEFAULT_EVAL = {
    "tictactoe": "mcts:100",
    "connect4": "mcts:10",
    "kuhn": "kuhn_nash:1/6",
    "leduc": "cfr",
    "mini_hanabi": "self",
    "simple_hanabi": "self",
}


class ConfigFileError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    games: tuple[str, ...] = ("kuhn",)
    group_size: int = 32
    max_steps: int = 200
    scheme: str = "mars"
    agent_specific: bool = True
    lambd: float = 1.0
    gamma: float = 1.0
    baseline: str = "pooled"
    opponent_mode: str = "self_play"
    group_shares_deal: bool = False
    multi_token: bool = False
    seed: int = 0
    output_dir: str = "runs/default"
    eval_interval: int = 20
    eval_games: int = 500
    eval_opponents: tuple[str, ...] = ()  # "game=spec" overrides of DEFAULT_EVAL
    cfr_iterations: int = 5000
    trajectory_log_interval: int = 20
    # rewards
    reward_scale_tictactoe: float = DEFAULT_SCALES["tictactoe"]
    reward_scale_connect4: float = DEFAULT_SCALES["connect4"]
    reward_scale_kuhn: float = DEFAULT_SCALES["kuhn"]
    reward_scale_leduc: float = DEFAULT_SCALES["leduc"]
    reward_scale_mini_hanabi: float = DEFAULT_SCALES["mini_hanabi"]
    reward_scale_simple_hanabi: float = DEFAULT_SCALES["simple_hanabi"]
    format_valid_bonus: float = 0.05
    format_invalid_penalty: float = -10.0
    length_alpha: float = 0.5
    length_min: int = 11
    length_max: int = 2048
    # optimization
    ppo_policy_clip: float = 0.2
    dual_clip_loss: bool = True
    dual_clip_ratio: float = 3.0
    kl_loss_coef: float = 0.2
    kl_anchor: str = "initial"
    entropy_coef: float = 0.0
    ppo_epochs: int = 1
    learning_rate: float = 0.05
    warmup_steps: int = 10
    gradient_norm_clip: float = 1.0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.95
    weight_decay: float = 0.0
    sampling_temperature: float = 0.6
    top_p: float = 0.99
    top_k: int = 100

    def reward_config(self) -> RewardConfig:
        scales = {g.value: getattr(self, f"reward_scale_{g.value}") for g in GameId}
        return RewardConfig(scales, self.format_valid_bonus, self.format_invalid_penalty, self.length_alpha,
                            self.length_min, self.length_max)

    def optim_config(self) -> OptimConfig:
        return OptimConfig(
            clip_eps=self.ppo_policy_clip, dual_clip=self.dual_clip_ratio, use_dual_clip=self.dual_clip_loss,
            kl_coef=self.kl_loss_coef, kl_anchor=self.kl_anchor, entropy_coef=self.entropy_coef,
            ppo_epochs=self.ppo_epochs, learning_rate=self.learning_rate, warmup_steps=self.warmup_steps,
            max_steps=self.max_steps, grad_clip=self.gradient_norm_clip,
            adam_betas=(self.adam_beta1, self.adam_beta2), weight_decay=self.weight_decay,
            temperature=self.sampling_temperature, top_p=self.top_p, top_k=self.top_k,
        )

    def eval_opponent(self, game: str) -> str:
        for item in self.eval_opponents:
            g, _, spec = item.partition("=")
            if g.strip() == game:
                return spec.strip()
        return DEFAULT_EVAL[game]

    def digest(self) -> str:
        text = "\n".join(f"{k}={v}" for k, v in sorted(to_dict(self).items()) if k != "output_dir")
        return hashlib.sha256(text.encode()).hexdigest()

    def validate(self) -> None:
        """Raises ``ValueError`` naming the offending key."""
        for g in self.games:
            if g not in {x.value for x in GameId}:
                raise _KeyError("games", f"unknown game {g!r}")
        if not self.games:
            raise _KeyError("games", "at least one game is required")
        if self.scheme not in SCHEMES:
            raise _KeyError("scheme", f"unknown scheme {self.scheme!r}; expected one of {', '.join(SCHEMES)}")
        if self.baseline not in ("pooled", "per_turn"):
            raise _KeyError("baseline", "baseline must be 'pooled' or 'per_turn'")
        if self.gamma != 1.0:
            raise _KeyError("gamma", "only gamma = 1 is supported")
        if not 0.0 <= self.lambd <= 1.0:
            raise _KeyError("lambd", "lambd must lie in [0, 1]")
        if self.group_size < 4 or self.group_size % 2:
            raise _KeyError("group_size", "group_size must be even and >= 4")
        if self.opponent_mode not in ("self_play", "fixed_opponent"):
            raise _KeyError("opponent_mode", "opponent_mode must be self_play or fixed_opponent")
        if self.opponent_mode == "fixed_opponent":
            for g in self.games:
                if g not in FIXED_OPPONENTS:
                    raise _KeyError("opponent_mode", f"no fixed opponent oracle exists for {g}")
        if self.max_steps < 1:
            raise _KeyError("max_steps", "max_steps must be >= 1")
        if self.eval_games % 2:
            raise _KeyError("eval_games", "eval_games must be even")
        for item in self.eval_opponents:
            if "=" not in item:
                raise _KeyError("eval_opponents", f"expected game=spec, got {item!r}")
        try:
            self.reward_config()
            self.optim_config()
        except ValueError as exc:
            raise _KeyError(None, str(exc)) from exc


class _KeyError(ValueError):
    def __init__(self, key: Optional[str], message: str):
        super().__init__(message)
        self.key = key


def to_dict(cfg: ExperimentConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(str(x) for x in v)
    return str(v)


def dump_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{k} = {_format_value(v)}\n" for k, v in to_dict(cfg).items())


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str):
    kind = _TYPES[key]
    if kind == "bool":
        low = raw.lower()
        if low not in ("true", "false"):
            raise ValueError(f"expected true/false, got {raw!r}")
        return low == "true"
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind.startswith("tuple"):
        return tuple(x.strip() for x in raw.split(",") if x.strip())
    return raw


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    values: dict = {}
    lines: dict = {}
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigFileError(f"{source}:{n}: expected 'key = value'")
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in _TYPES:
            raise ConfigFileError(f"{source}:{n}: unknown key {key!r}")
        if key in values:
            raise ConfigFileError(f"{source}:{n}: duplicate key {key!r}")
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigFileError(f"{source}:{n}: bad value for {key}: {exc}") from exc
        lines[key] = n
    cfg = ExperimentConfig(**values)
    try:
        cfg.validate()
    except _KeyError as exc:
        where = f"{source}:{lines[exc.key]}" if exc.key in lines else source
        raise ConfigFileError(f"{where}: {exc}") from exc
    return cfg


def load_config(path: str | Path, env: Optional[dict] = None) -> ExperimentConfig:
    """Read a config file; ``MARS_SEED`` / ``MARS_OUTPUT_DIR`` in ``env`` override it."""
    path = Path(path)
    cfg = parse_config(path.read_text(), str(path))
    env = os.environ if env is None else env
    overrides = {}
    if env.get("MARS_SEED"):
        overrides["seed"] = int(env["MARS_SEED"])
    if env.get("MARS_OUTPUT_DIR"):
        overrides["output_dir"] = env["MARS_OUTPUT_DIR"]
    return replace(cfg, **overrides) if overrides else cfg


def ablation_variants(cfg: ExperimentConfig) -> dict[str, ExperimentConfig]:
    """The comparison matrix: full method and its three ablations."""
    out = {
        "mars": replace(cfg, scheme="mars", agent_specific=True, opponent_mode="self_play"),
        "wo_turn_level": replace(cfg, scheme="naive_multi", agent_specific=True, opponent_mode="self_play"),
        "wo_agent_specific": replace(cfg, scheme="mars", agent_specific=False, opponent_mode="self_play"),
    }
    if all(g in FIXED_OPPONENTS for g in cfg.games):
        out["fixed_opponent"] = replace(cfg, scheme="mars", agent_specific=True, opponent_mode="fixed_opponent")
    return out


__all__ = [
    "ConfigFileError",
    "DEFAULT_EVAL",
    "ExperimentConfig",
    "FIXED_OPPONENTS",
    "GENERALIST_GAMES",
    "ablation_variants",
    "dump_config",
    "load_config",
    "parse_config",
    "to_dict",
]
