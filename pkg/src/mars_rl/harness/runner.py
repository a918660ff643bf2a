"""Training runs, evaluation sweeps and the ablation matrix, with their on-disk artifacts.

A run directory holds::

    config.cfg          resolved config
    metrics.csv         one row per step, deterministic
    timing.csv          wall-clock per step (kept apart so metrics.csv is reproducible)
    eval.csv            periodic evaluation against the game's oracle opponents
    trajectories.jsonl  sampled turn records
    checkpoint.npz      latest policy, optimizer moments and reference logits
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ..estimator import MarsSelfPlay, step_seed
from ..opponents import PokerTree, evaluate_matchup, exact_poker_matchup
from ..rollout import trajectory_records
from ..train import load_checkpoint, save_checkpoint
from .config import ExperimentConfig, ablation_variants, dump_config
from .specs import is_exact, make_opponent

log = logging.getLogger(__name__)

METRIC_BASE = ("step", "lr", "objective", "kl", "grad_norm", "mean_abs_adv", "format_violation_rate")
EVAL_FIELDS = ("step", "game", "opponent", "n_games", "seat0_mean", "seat1_mean", "mean", "ci95", "normalized",
               "exact_mean", "format_violations", "config_digest")
EVAL_SEED_OFFSET = 1000


def metric_fields(cfg: ExperimentConfig) -> tuple[str, ...]:
    seats = tuple(f"return_{g}_p{p}" for g in cfg.games for p in (0, 1))
    return METRIC_BASE + seats + ("config_digest",)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


class CsvLog:
    """Append-only CSV with a fixed header; floats are written with ``repr`` so they parse back exactly."""

    def __init__(self, path: Path, fields: tuple[str, ...]):
        self.path, self.fields = path, fields
        if not path.exists() or path.stat().st_size == 0:
            with open(path, "w", newline="") as fh:
                csv.writer(fh).writerow(fields)

    def append(self, row: dict) -> None:
        with open(self.path, "a", newline="") as fh:
            csv.writer(fh).writerow([_fmt(row.get(k)) for k in self.fields])

    def truncate_after(self, step: int) -> None:
        """Drop rows past ``step`` (left by an interrupted run)."""
        rows = read_csv(self.path)
        with open(self.path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.fields)
            for r in rows:
                if int(r["step"]) <= step:
                    w.writerow([r.get(k, "") for k in self.fields])


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def read_metrics(path: str | Path) -> list[dict]:
    """Metrics rows with numeric columns parsed back to ``int``/``float``."""
    out = []
    for r in read_csv(path):
        row = {}
        for k, v in r.items():
            if k == "config_digest" or v == "":
                row[k] = v
            elif k == "step":
                row[k] = int(v)
            else:
                row[k] = float(v)
        out.append(row)
    return out


@dataclass
class RunResult:
    output_dir: Path
    estimator: MarsSelfPlay
    eval_rows: list[dict] = field(default_factory=list)

    def final_eval(self) -> dict[str, float]:
        """Last evaluation per game; exact expectation where available."""
        out = {}
        for r in self.eval_rows:
            out[r["game"]] = r["exact_mean"] if r.get("exact_mean") not in (None, "") else r["mean"]
        return out


def evaluate_policy(policy, cfg: ExperimentConfig, step: int, trees: Optional[dict] = None) -> list[dict]:
    """One evaluation sweep; deals are the same at every step so curves compare like with like."""
    rows = []
    trees = {} if trees is None else trees
    for gi, game in enumerate(cfg.games):
        spec = cfg.eval_opponent(game)
        opp = make_opponent(spec, game, learner=policy, cfr_iterations=cfg.cfr_iterations)
        rep = evaluate_matchup(policy, opp, game, cfg.eval_games,
                               base_seed=step_seed(cfg.seed, 0, EVAL_SEED_OFFSET + gi))
        exact = None
        if is_exact(spec, game):
            tree = trees.setdefault(game, PokerTree(game))
            exact = float(np.mean(exact_poker_matchup(policy, opp, game, tree)))
        rows.append(dict(step=step, game=game, opponent=spec, n_games=rep.n_games, seat0_mean=rep.seat0_mean,
                         seat1_mean=rep.seat1_mean, mean=rep.mean, ci95=rep.ci95, normalized=rep.normalized,
                         exact_mean=exact, format_violations=rep.format_violations,
                         config_digest=cfg.digest()))
    return rows


def _atomic_checkpoint(path: Path, est: MarsSelfPlay, digest: str) -> None:
    tmp = path.with_suffix(".tmp")
    save_checkpoint(tmp, est.policy_, est.adam_, est.step_, digest, est.reference_)
    os.replace(tmp, path)


def train_run(cfg: ExperimentConfig, fresh: bool = False, force: bool = False,
              progress: Optional[Callable[[dict], None]] = None) -> RunResult:
    """Run (or resume) one training run, writing every artifact into ``cfg.output_dir``."""
    cfg.validate()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()
    ckpt = out / "checkpoint.npz"
    if fresh:
        ckpt.unlink(missing_ok=True)
    resume = ckpt.exists()
    if not resume:
        for name in ("metrics.csv", "timing.csv", "eval.csv", "trajectories.jsonl"):
            (out / name).unlink(missing_ok=True)
    (out / "config.cfg").write_text(dump_config(cfg))

    metrics = CsvLog(out / "metrics.csv", metric_fields(cfg))
    timing = CsvLog(out / "timing.csv", ("step", "wall_seconds"))
    evals = CsvLog(out / "eval.csv", EVAL_FIELDS)
    est = MarsSelfPlay(config=cfg).reset()
    trees: dict = {}

    if resume:
        policy, adam, step, _, reference = load_checkpoint(ckpt, digest, force=force)
        est.restore(policy, adam, step, reference)
        for logf in (metrics, timing, evals):
            logf.truncate_after(step)
        _truncate_jsonl(out / "trajectories.jsonl", step)
        log.info("resuming %s at step %d", out, step)
    else:
        for row in evaluate_policy(est.policy_, cfg, 0, trees):
            evals.append(row)

    while est.step_ < cfg.max_steps:
        t0 = time.perf_counter()
        est.partial_fit()
        res, groups = est.last_step_
        step = est.step_
        row = dict(res.metrics, config_digest=digest)
        if step == 1 or step % cfg.trajectory_log_interval == 0:
            with open(out / "trajectories.jsonl", "a") as fh:
                for g in groups:
                    for rec in trajectory_records(g.trajectories):
                        fh.write(json.dumps(dict(step=step, **rec)) + "\n")
        if step % cfg.eval_interval == 0 or step == cfg.max_steps:
            for erow in evaluate_policy(est.policy_, cfg, step, trees):
                evals.append(erow)
        metrics.append(row)
        timing.append(dict(step=step, wall_seconds=time.perf_counter() - t0))
        _atomic_checkpoint(ckpt, est, digest)
        if progress:
            progress(row)

    eval_rows = [r for r in read_csv(out / "eval.csv")]
    last = max(int(r["step"]) for r in eval_rows)
    final = [dict(r, exact_mean=float(r["exact_mean"]) if r["exact_mean"] else None, mean=float(r["mean"]))
             for r in eval_rows if int(r["step"]) == last]
    return RunResult(out, est, final)


def _truncate_jsonl(path: Path, step: int) -> None:
    if not path.exists():
        return
    keep = [line for line in path.read_text().splitlines() if line and json.loads(line)["step"] <= step]
    path.write_text("".join(line + "\n" for line in keep))


# -- ablation ---------------------------------------------------------------------------


@dataclass
class AblationCell:
    variant: str
    game: str
    values: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def std(self) -> float:
        return float(np.std(self.values))


def ablate(cfg: ExperimentConfig, n_seeds: int = 5, variants: Optional[list[str]] = None,
           progress: Optional[Callable[[str], None]] = None) -> list[AblationCell]:
    """Train every variant of the comparison matrix over ``n_seeds`` seeds under ``cfg.output_dir``."""
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    matrix = ablation_variants(cfg)
    if variants:
        unknown = set(variants) - set(matrix)
        if unknown:
            raise ValueError(f"unknown or unavailable variants: {sorted(unknown)}")
        matrix = {k: v for k, v in matrix.items() if k in variants}
    root = Path(cfg.output_dir)
    cells: dict[tuple[str, str], AblationCell] = {}
    for name, vcfg in matrix.items():
        for i in range(n_seeds):
            run_cfg = replace(vcfg, seed=cfg.seed + i, output_dir=str(root / name / f"seed_{cfg.seed + i}"))
            result = train_run(run_cfg)
            for game, value in result.final_eval().items():
                cells.setdefault((name, game), AblationCell(name, game, [])).values.append(value)
            if progress:
                progress(f"{name} seed {cfg.seed + i}: {result.final_eval()}")
    out = list(cells.values())
    write_ablation(root, out)
    return out


def format_ablation(cells: list[AblationCell]) -> str:
    games = sorted({c.game for c in cells})
    variants = list(dict.fromkeys(c.variant for c in cells))
    by = {(c.variant, c.game): c for c in cells}
    width = max(len(v) for v in variants + ["variant"])
    lines = ["variant".ljust(width) + "".join(f"  {g:>22}" for g in games)]
    for v in variants:
        cells_txt = []
        for g in games:
            c = by.get((v, g))
            cells_txt.append(f"  {f'{c.mean:+.4f} ± {c.std:.4f}' if c else '-':>22}")
        lines.append(v.ljust(width) + "".join(cells_txt))
    return "\n".join(lines) + "\n"


def write_ablation(root: Path, cells: list[AblationCell]) -> None:
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "ablation.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("variant", "game", "mean", "std", "n_seeds", "values"))
        for c in cells:
            w.writerow((c.variant, c.game, repr(c.mean), repr(c.std), len(c.values),
                        " ".join(repr(v) for v in c.values)))
    (root / "ablation.txt").write_text(format_ablation(cells))


__all__ = [
    "AblationCell",
    "CsvLog",
    "EVAL_FIELDS",
    "RunResult",
    "ablate",
    "evaluate_policy",
    "format_ablation",
    "metric_fields",
    "read_csv",
    "read_metrics",
    "train_run",
]
