"""Self-play episodes, per-player trajectories and GRPO groups."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional, Protocol, Sequence

import numpy as np

from .games import GameId, GameState, ParseFailure, chance_rng, init_game, parse_action
from .policy import Emission
from .rewards import RewardBreakdown, RewardConfig, compose_turn_reward

SAMPLING_EVENT = 1 << 20  # chance-stream index reserved for policy sampling


class ConfigError(ValueError):
    """Raised for group sizes or settings an estimator cannot work with."""


class Agent(Protocol):
    def act(self, state: GameState, rng: np.random.Generator) -> Emission: ...


@dataclass(frozen=True)
class FixedTextAgent:
    """Emits the same raw text every turn; used to inject format violations."""

    text: str = "garbage"

    def act(self, state: GameState, rng: np.random.Generator) -> Emission:
        return Emission(self.text, tuple(self.text), (0.0,) * len(self.text))


@dataclass(frozen=True)
class TurnRecord:
    player: int
    k: int
    observation: str
    emission: Emission
    action: Optional[str]
    game_reward: float  # raw game units credited to this turn
    reward: RewardBreakdown
    terminal: bool

    @property
    def tokens(self) -> tuple[str, ...]:
        return self.emission.tokens

    @property
    def logprobs(self) -> tuple[float, ...]:
        return self.emission.logprobs


@dataclass
class Trajectory:
    episode_id: int
    game: GameId
    player: int
    turns: list[TurnRecord] = field(default_factory=list)

    @property
    def rewards(self) -> list[float]:
        return [t.reward.total for t in self.turns]

    @property
    def episode_return(self) -> float:
        return float(sum(self.rewards))

    @property
    def game_return(self) -> float:
        return float(sum(t.game_reward for t in self.turns))

    @property
    def format_violation(self) -> bool:
        return any(t.action is None for t in self.turns)

    def __len__(self) -> int:
        return len(self.turns)


@dataclass
class Group:
    """Trajectories from one game environment, partitioned by seat."""

    game: GameId
    instance: str
    trajectories: list[Trajectory]

    @property
    def subgroups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, t in enumerate(self.trajectories):
            out.setdefault(t.player, []).append(i)
        return dict(sorted(out.items()))

    def __len__(self) -> int:
        return len(self.trajectories)


def run_episode(
    game: GameId | str,
    policy_p0: Agent,
    policy_p1: Agent,
    seed: int,
    cfg: RewardConfig = RewardConfig(),
    episode_id: int = 0,
    sample_seed: Optional[int] = None,
) -> tuple[Trajectory, Trajectory]:
    """Play one episode; format violations end it with the penalty on the offending turn.

    Game rewards a player earns between their own turns are credited to their
    most recent turn (or to their first turn if they have not acted yet).
    """
    game = GameId(game)
    state = init_game(game, seed)
    rng = chance_rng(seed if sample_seed is None else sample_seed, SAMPLING_EVENT)
    agents = (policy_p0, policy_p1)
    raw: list[list[dict]] = [[], []]
    pending = [0.0, 0.0]

    while not state.terminal:
        p = state.player
        obs = state.observe(p)
        emission = agents[p].act(state, rng)
        action = parse_action(game, emission.text, state)
        turn = dict(observation=obs, emission=emission, game=pending[p], valid=True, action=None)
        pending[p] = 0.0
        raw[p].append(turn)
        if isinstance(action, ParseFailure):
            turn["valid"] = False
            break
        turn["action"] = action
        outcome = state.apply(action)
        for q in (0, 1):
            if raw[q]:
                raw[q][-1]["game"] += outcome.rewards[q]
            else:
                pending[q] += outcome.rewards[q]
        state = outcome.state

    trajs = []
    for q in (0, 1):
        turns = []
        for k, t in enumerate(raw[q], start=1):
            bd = compose_turn_reward(t["game"], game, t["valid"], t["emission"].length, cfg)
            turns.append(TurnRecord(q, k, t["observation"], t["emission"], t["action"], t["game"], bd,
                                    k == len(raw[q])))
        trajs.append(Trajectory(episode_id, game, q, turns))
    return trajs[0], trajs[1]


def _check_group_size(G: int) -> None:
    if G < 4 or G % 2:
        raise ConfigError(f"group size must be even and >= 4 (two trajectories per seat), got {G}")


def collect_group(
    game: GameId | str,
    policy: Agent,
    group_size: int,
    base_seed: int,
    cfg: RewardConfig = RewardConfig(),
    group_shares_deal: bool = False,
) -> Group:
    """Self-play ``group_size / 2`` episodes with ``policy`` in both seats."""
    _check_group_size(group_size)
    game = GameId(game)
    trajs: list[Trajectory] = []
    for e in range(group_size // 2):
        seed = base_seed if group_shares_deal else base_seed + e
        trajs.extend(run_episode(game, policy, policy, seed, cfg, episode_id=e, sample_seed=base_seed + e))
    return Group(game, f"{game.value}/{base_seed}", trajs)


def fixed_opponent_group(
    game: GameId | str,
    policy: Agent,
    opponent: Agent,
    group_size: int,
    base_seed: int,
    cfg: RewardConfig = RewardConfig(),
    group_shares_deal: bool = False,
) -> Group:
    """Learner against a frozen opponent; the learner's seat alternates by episode."""
    _check_group_size(group_size)
    game = GameId(game)
    trajs: list[Trajectory] = []
    for e in range(group_size):
        seat = e % 2
        seats = (policy, opponent) if seat == 0 else (opponent, policy)
        seed = base_seed if group_shares_deal else base_seed + e
        pair = run_episode(game, *seats, seed, cfg, episode_id=e, sample_seed=base_seed + e)
        trajs.append(pair[seat])
    return Group(game, f"{game.value}/{base_seed}", trajs)


# -- trajectory log -----------------------------------------------------------------

LOG_FIELDS = ("episode_id", "game", "player", "k", "action", "reward_game", "reward_format",
              "reward_length", "reward_total", "terminal")


def trajectory_records(trajectories: Iterable[Trajectory]) -> Iterator[dict]:
    for traj in trajectories:
        for t in traj.turns:
            yield dict(zip(LOG_FIELDS, (
                traj.episode_id, traj.game.value, t.player, t.k,
                t.action if t.action is not None else t.emission.text,
                t.reward.game, t.reward.format, t.reward.length, t.reward.total, t.terminal,
            )))


def write_trajectory_log(trajectories: Iterable[Trajectory], fp: IO[str]) -> int:
    """Append one JSON line per turn; returns the number of lines written."""
    n = 0
    for rec in trajectory_records(trajectories):
        fp.write(json.dumps(rec) + "\n")
        n += 1
    return n


def read_trajectory_log(fp: IO[str]) -> list[dict]:
    return [json.loads(line) for line in fp if line.strip()]


def group_seat_returns(groups: Sequence[Group]) -> dict[str, float]:
    """Mean game-unit return per game and seat, e.g. ``{'kuhn_p0': -0.1, ...}``."""
    acc: dict[str, list[float]] = {}
    for g in groups:
        for t in g.trajectories:
            acc.setdefault(f"{g.game.value}_p{t.player}", []).append(t.game_return)
    return {k: float(np.mean(v)) for k, v in sorted(acc.items())}
