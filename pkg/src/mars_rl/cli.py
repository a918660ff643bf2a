"""Command line: ``mars-rl {train,evaluate,ablate,solve,inspect}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .games import GameId
from .harness.config import ConfigFileError, load_config
from .harness.runner import ablate, format_ablation, train_run
from .harness.specs import OpponentSpecError, is_exact, make_opponent
from .opponents import BehaviorPolicy, PokerTree, cfr_solve, evaluate_matchup, exact_poker_matchup
from .policy import TabularPolicy
from .train import DigestMismatch, load_checkpoint


def _cmd_train(args) -> int:
    cfg = load_config(args.config)
    if args.output_dir:
        cfg = replace(cfg, output_dir=args.output_dir)

    def progress(row):
        if not args.quiet and (row["step"] % max(cfg.eval_interval, 1) == 0 or row["step"] == cfg.max_steps):
            rets = " ".join(f"{k[7:]}={v:+.3f}" for k, v in row.items() if k.startswith("return_"))
            print(f"step {row['step']:4d}  obj={row['objective']:+.4f}  kl={row['kl']:.4f}  {rets}", flush=True)

    result = train_run(cfg, fresh=args.fresh, force=args.force, progress=progress)
    for game, value in result.final_eval().items():
        print(f"final eval {game}: {value:+.4f}")
    print(f"artifacts in {result.output_dir}")
    return 0


def _cmd_evaluate(args) -> int:
    game = GameId(args.game)
    if args.checkpoint:
        policy, *_ = load_checkpoint(args.checkpoint)
    else:
        policy = TabularPolicy(temperature=0.6, top_p=0.99, top_k=100)
    opp = make_opponent(args.opponent, game, learner=policy, cfr_iterations=args.cfr_iterations)
    rep = evaluate_matchup(policy, opp, game, args.n_games, base_seed=args.seed)
    out = rep.as_dict()
    out["opponent"] = args.opponent
    if is_exact(args.opponent, game):
        out["exact_seat0"], out["exact_seat1"] = exact_poker_matchup(policy, opp, game, PokerTree(game))
        out["exact_mean"] = (out["exact_seat0"] + out["exact_seat1"]) / 2
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"{game.value} vs {args.opponent} over {rep.n_games} games")
        print(f"  seat 0 mean {rep.seat0_mean:+.4f}   seat 1 mean {rep.seat1_mean:+.4f}")
        print(f"  mean {rep.mean:+.4f} ± {rep.ci95:.4f} (95% CI)   normalized {rep.normalized:+.4f}")
        if "exact_mean" in out:
            print(f"  exact expectation {out['exact_mean']:+.6f}")
        if rep.format_violations:
            print(f"  format violations: {rep.format_violations}")
    return 0


def _cmd_ablate(args) -> int:
    cfg = load_config(args.config)
    if args.output_dir:
        cfg = replace(cfg, output_dir=args.output_dir)
    cells = ablate(cfg, n_seeds=args.seeds, variants=args.variants,
                   progress=None if args.quiet else (lambda msg: print(msg, flush=True)))
    print(format_ablation(cells), end="")
    print(f"table written to {Path(cfg.output_dir) / 'ablation.csv'}")
    return 0


def _cmd_solve(args) -> int:
    (p0, p1), trace = cfr_solve(args.game, args.iterations, interval=args.interval)
    merged = dict(p0.table)
    merged.update(p1.table)
    policy = BehaviorPolicy(merged)
    tree = PokerTree(args.game)
    value = tree.expected_value(tree.tables(policy), tree.tables(policy))
    if args.output:
        policy.save(args.output)
    for it, expl in trace:
        print(f"iteration {it:>9d}  exploitability {expl:.6g}")
    print(f"value to player 0: {value:+.6f}")
    if args.output:
        print(f"policy written to {args.output}")
    return 0


def _cmd_inspect(args) -> int:
    with open(args.log) as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if args.step is not None:
        records = [r for r in records if r.get("step") == args.step]
    if args.game:
        records = [r for r in records if r["game"] == args.game]
    episodes: dict = {}
    for r in records:
        episodes.setdefault((r.get("step"), r["game"], r["episode_id"]), []).append(r)
    for n, ((step, game, ep), turns) in enumerate(episodes.items()):
        if n >= args.limit:
            print(f"... {len(episodes) - n} more episodes")
            break
        print(f"step {step}  {game}  episode {ep}")
        for t in sorted(turns, key=lambda r: (r["k"], r["player"])):
            flag = "  [end]" if t["terminal"] else ""
            print(f"  p{t['player']} turn {t['k']}: {t['action']:<28} game {t['reward_game']:+.2f}  "
                  f"format {t['reward_format']:+.2f}  length {t['reward_length']:.3f}  "
                  f"total {t['reward_total']:+.3f}{flag}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mars-rl", description="Turn-level self-play training on two-player games.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train from a config file (resumes from an existing checkpoint)")
    p.add_argument("config")
    p.add_argument("--output-dir")
    p.add_argument("--fresh", action="store_true", help="ignore any existing checkpoint")
    p.add_argument("--force", action="store_true", help="resume even if the config digest changed")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="play a checkpoint against an opponent")
    p.add_argument("--checkpoint", help="checkpoint.npz; omit for the untrained uniform policy")
    p.add_argument("--game", required=True, choices=[g.value for g in GameId])
    p.add_argument("--opponent", required=True, help="mcts:N, kuhn_nash[:alpha], cfr[:path], uniform or self")
    p.add_argument("--n-games", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cfr-iterations", type=int, default=5000)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("ablate", help="run the comparison matrix over several seeds")
    p.add_argument("config")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--variants", nargs="*")
    p.add_argument("--output-dir")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("solve", help="approximate a poker equilibrium with CFR")
    p.add_argument("--game", default="kuhn", choices=["kuhn", "leduc"])
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--interval", type=int, help="record exploitability every N iterations (default: log-spaced)")
    p.add_argument("--output", help="write the average policy here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("inspect", help="pretty-print a trajectory log")
    p.add_argument("log")
    p.add_argument("--step", type=int)
    p.add_argument("--game")
    p.add_argument("--limit", type=int, default=5)
    p.set_defaults(func=_cmd_inspect)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigFileError, OpponentSpecError, DigestMismatch, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
