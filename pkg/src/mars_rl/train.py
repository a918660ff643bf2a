"""Optimizer state, learning-rate schedule, training step and checkpoints."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .advantage import AdvantageAssignment, agent_specific_advantage
from .objective import build_token_batch, surrogate_objective
from .policy import TabularPolicy
from .rollout import Group, group_seat_returns

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class OptimConfig:
    clip_eps: float = 0.2
    dual_clip: float = 3.0
    use_dual_clip: bool = True
    kl_coef: float = 0.2
    kl_anchor: str = "initial"  # or "old"
    entropy_coef: float = 0.0
    ppo_epochs: int = 1
    learning_rate: float = 1e-6
    warmup_steps: int = 10
    max_steps: int = 200
    grad_clip: float = 1.0
    adam_betas: tuple[float, float] = (0.9, 0.95)
    adam_eps: float = 1e-8
    weight_decay: float = 0.0
    temperature: float = 0.6
    top_p: float = 0.99
    top_k: int = 100

    def __post_init__(self):
        if not 0 < self.clip_eps < 1:
            raise ValueError("clip_eps must lie in (0, 1)")
        if self.use_dual_clip and not self.dual_clip > 1:
            raise ValueError("dual_clip must be > 1")
        if self.kl_coef < 0:
            raise ValueError("kl_coef must be >= 0")
        if self.kl_anchor not in ("initial", "old"):
            raise ValueError("kl_anchor must be 'initial' or 'old'")


# named sampling presets; the two common temperature settings
SAMPLING_PRESETS = {
    "rollout": dict(temperature=0.6, top_p=0.99, top_k=100),
    "table": dict(temperature=0.5, top_p=0.99, top_k=100),
}


def learning_rate(step: int, cfg: OptimConfig) -> float:
    """Linear warmup to the peak over ``warmup_steps``, then cosine decay to 0 at ``max_steps``.

    ``step`` is 1-based.
    """
    peak = cfg.learning_rate
    if cfg.warmup_steps > 0 and step <= cfg.warmup_steps:
        return peak * step / cfg.warmup_steps
    span = max(cfg.max_steps - cfg.warmup_steps, 1)
    progress = min(max(step - cfg.warmup_steps, 0) / span, 1.0)
    return peak * 0.5 * (1.0 + math.cos(math.pi * progress))


@dataclass
class AdamState:
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


class NonFiniteGradient(FloatingPointError):
    pass


def grad_norm(grad: dict[str, np.ndarray]) -> float:
    return math.sqrt(sum(float(np.dot(g, g)) for g in grad.values()))


def adam_ascent(params: TabularPolicy, grad: dict[str, np.ndarray], state: AdamState, lr: float,
                cfg: OptimConfig) -> None:
    """In-place Adam ascent step over the keys present in ``grad``."""
    b1, b2 = cfg.adam_betas
    state.t += 1
    c1, c2 = 1 - b1 ** state.t, 1 - b2 ** state.t
    for key in sorted(grad):
        g = grad[key]
        z = params.logits[key]
        if cfg.weight_decay:
            g = g - cfg.weight_decay * z
        m = state.m.get(key, np.zeros_like(z))
        v = state.v.get(key, np.zeros_like(z))
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        state.m[key], state.v[key] = m, v
        params.logits[key] = z + lr * (m / c1) / (np.sqrt(v / c2) + cfg.adam_eps)


@dataclass
class StepResult:
    policy: TabularPolicy
    metrics: dict
    aborted: bool = False


def compute_advantages(groups: Sequence[Group], scheme: str, agent_specific: bool, lam: float = 1.0,
                       baseline: str = "pooled") -> list[AdvantageAssignment]:
    return [agent_specific_advantage(g, scheme, agent_specific, lam, baseline) for g in groups]


def train_step(
    params: TabularPolicy,
    groups: Sequence[Group],
    advantages: Sequence[AdvantageAssignment],
    cfg: OptimConfig,
    step: int,
    adam: AdamState,
    reference: Optional[TabularPolicy] = None,
) -> StepResult:
    """One ascent step on the surrogate; ``params`` must be the policy that collected ``groups``.

    Returns a new policy object; ``params`` is left untouched.  A non-finite
    gradient aborts the step and returns the unchanged policy.
    """
    old = params.copy()
    new = params.copy()
    samples = build_token_batch(groups, advantages, old)
    for s in samples:
        new.ensure(s.key, s.vocab)
    ref = old if cfg.kl_anchor == "old" else reference
    res = None
    for _ in range(cfg.ppo_epochs):
        res = surrogate_objective(samples, new, ref, cfg.clip_eps, cfg.dual_clip if cfg.use_dual_clip else None,
                                  cfg.kl_coef, cfg.entropy_coef)
        gn = grad_norm(res.grad)
        if not math.isfinite(gn) or not math.isfinite(res.value):
            log.warning("step %d: non-finite gradient, update skipped", step)
            return StepResult(params, _metrics(step, 0.0, res, gn, groups, advantages), aborted=True)
        if cfg.grad_clip and gn > cfg.grad_clip:
            res.grad = {k: g * (cfg.grad_clip / gn) for k, g in res.grad.items()}
        lr = learning_rate(step, cfg)
        adam_ascent(new, res.grad, adam, lr, cfg)
    return StepResult(new, _metrics(step, learning_rate(step, cfg), res, gn, groups, advantages))


def _metrics(step, lr, res, gn, groups, advantages) -> dict:
    adv = [abs(a) for assign in advantages for arr in assign.turn_advantages for a in arr]
    trajs = [t for g in groups for t in g.trajectories]
    out = {
        "step": step,
        "lr": lr,
        "objective": res.value if res else 0.0,
        "kl": res.kl if res else 0.0,
        "grad_norm": gn,
        "mean_abs_adv": float(np.mean(adv)) if adv else 0.0,
        "format_violation_rate": float(np.mean([t.format_violation for t in trajs])) if trajs else 0.0,
    }
    out.update({f"return_{k}": v for k, v in group_seat_returns(groups).items()})
    return out


# -- checkpoints --------------------------------------------------------------------


def save_checkpoint(path: str | Path, policy: TabularPolicy, adam: AdamState, step: int, digest: str,
                    reference: Optional[TabularPolicy] = None) -> None:
    keys = sorted(policy.logits)
    sizes = [len(policy.vocab[k]) for k in keys]

    def flat(d):
        return np.concatenate([d.get(k, np.zeros(n)) for k, n in zip(keys, sizes)]) if keys else np.zeros(0)

    ref_logits = reference.logits if reference is not None else {}
    header = dict(
        version=CHECKPOINT_VERSION,
        step=step,
        digest=digest,
        adam_t=adam.t,
        keys=keys,
        vocab=[list(policy.vocab[k]) for k in keys],
        policy=dict(multi_token=policy.multi_token, temperature=policy.temperature, top_p=policy.top_p,
                    top_k=policy.top_k),
    )
    path = Path(path)
    with open(path, "wb") as fh:
        np.savez(fh, header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
                 logits=flat(policy.logits), m=flat(adam.m), v=flat(adam.v), ref=flat(ref_logits))


class DigestMismatch(RuntimeError):
    pass


def load_checkpoint(path: str | Path, expected_digest: Optional[str] = None, force: bool = False):
    """Returns ``(policy, adam_state, step, digest, reference)``."""
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        if header["version"] != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {header['version']}")
        if expected_digest is not None and header["digest"] != expected_digest and not force:
            raise DigestMismatch(f"checkpoint digest {header['digest'][:12]} does not match config "
                                 f"{expected_digest[:12]}; pass force to override")
        arrays = {k: data[k] for k in ("logits", "m", "v", "ref")}
    policy = TabularPolicy(**header["policy"])
    adam = AdamState(t=header["adam_t"])
    reference = TabularPolicy(**header["policy"])
    off = 0
    for key, vocab in zip(header["keys"], header["vocab"]):
        n = len(vocab)
        policy.vocab[key] = reference.vocab[key] = tuple(vocab)
        policy.logits[key] = arrays["logits"][off : off + n].copy()
        adam.m[key] = arrays["m"][off : off + n].copy()
        adam.v[key] = arrays["v"][off : off + n].copy()
        reference.logits[key] = arrays["ref"][off : off + n].copy()
        off += n
    return policy, adam, header["step"], header["digest"], reference


def config_to_dict(cfg: OptimConfig) -> dict:
    return asdict(cfg)
