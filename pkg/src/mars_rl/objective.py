"""Clipped surrogate objective with exact softmax gradients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .advantage import AdvantageAssignment
from .policy import TabularPolicy, Vocab
from .rollout import Group


class BatchCorruption(ValueError):
    """A recorded token cannot be scored under the behavior policy."""


@dataclass(frozen=True)
class TokenSample:
    key: str
    vocab: Vocab
    index: int
    advantage: float
    weight: float
    support: np.ndarray
    old_logprob: float


def surrogate(ratio: float, adv: float, eps: float, dual_clip: Optional[float]) -> tuple[float, float]:
    """Token objective and its derivative with respect to the ratio."""
    unclipped = ratio * adv
    clipped = min(max(ratio, 1.0 - eps), 1.0 + eps) * adv
    if unclipped <= clipped:
        val, d = unclipped, adv
    else:
        val, d = clipped, 0.0
    if dual_clip is not None and adv < 0 and val < dual_clip * adv:
        val, d = dual_clip * adv, 0.0
    return val, d


def token_weights(group: Group, scheme: str) -> list[list[np.ndarray]]:
    """Per-token averaging weights, nested seat -> trajectory -> turn -> token.

    ``naive`` treats a trajectory as one long response (1 / total tokens)
    instead of averaging turn by turn.
    """
    subgroups = {p: [i for i in idx if len(group.trajectories[i])] for p, idx in group.subgroups.items()}
    subgroups = {p: idx for p, idx in subgroups.items() if idx}
    P = len(subgroups)
    out = [[] for _ in group.trajectories]
    for idx in subgroups.values():
        for i in idx:
            turns = group.trajectories[i].turns
            base = 1.0 / (P * len(idx))
            if scheme == "naive":
                n = sum(len(t.tokens) for t in turns)
                out[i] = [np.full(len(t.tokens), base / n) for t in turns]
            else:
                out[i] = [np.full(len(t.tokens), base / (len(turns) * len(t.tokens))) for t in turns]
    return out


def build_token_batch(
    groups: Sequence[Group],
    advantages: Sequence[AdvantageAssignment],
    params_old: TabularPolicy,
) -> list[TokenSample]:
    """Flatten groups into weighted token samples; group weights are averaged equally."""
    samples = []
    gw = 1.0 / len(groups)
    for group, assign in zip(groups, advantages):
        weights = token_weights(group, assign.scheme)
        for i, traj in enumerate(group.trajectories):
            for k, turn in enumerate(traj.turns):
                if turn.action is None:
                    continue  # format violations carry no scoreable tokens
                a = float(assign.turn_advantages[i][k])
                for t, (tok, (key, vocab)) in enumerate(zip(turn.tokens, turn.emission.decisions)):
                    if tok not in vocab:
                        raise BatchCorruption(f"token {tok!r} not in its decision vocabulary")
                    j = vocab.index(tok)
                    support = params_old.support(key, vocab)
                    p_old = params_old.probs(key, vocab, support)
                    if not support[j] or p_old[j] <= 0:
                        raise BatchCorruption(f"token {tok!r} has zero probability under the behavior policy")
                    samples.append(TokenSample(key, vocab, j, a, gw * float(weights[i][k][t]), support,
                                               float(np.log(p_old[j]))))
    return samples


@dataclass
class ObjectiveResult:
    value: float
    surrogate: float
    kl: float
    entropy: float
    grad: dict[str, np.ndarray]


def surrogate_objective(
    samples: Sequence[TokenSample],
    params_new: TabularPolicy,
    params_ref: Optional[TabularPolicy] = None,
    clip_eps: float = 0.2,
    dual_clip: Optional[float] = 3.0,
    kl_coef: float = 0.2,
    entropy_coef: float = 0.0,
) -> ObjectiveResult:
    """Weighted clipped surrogate minus ``kl_coef`` * KL(new || ref), plus optional entropy bonus.

    Returns the value and its exact gradient with respect to ``params_new``'s
    logits.  Decision points absent from ``params_new`` are treated as zeros
    and appear in the gradient under their key.
    """
    T = params_new.temperature
    if T <= 0:
        raise ValueError("objective needs a positive temperature")
    grad: dict[str, np.ndarray] = {}
    surr_total = kl_total = ent_total = 0.0
    for s in samples:
        z = params_new.get_logits(s.key, s.vocab)
        g = grad.setdefault(s.key, np.zeros(len(s.vocab)))

        p = params_new.probs(s.key, s.vocab, s.support)
        ratio = float(np.exp(np.log(p[s.index]) - s.old_logprob))
        val, dval = surrogate(ratio, s.advantage, clip_eps, dual_clip)
        surr_total += s.weight * val
        if dval != 0.0:
            onehot = np.zeros(len(s.vocab))
            onehot[s.index] = 1.0
            g += s.weight * dval * ratio / T * np.where(s.support, onehot - p, 0.0)

        if kl_coef or entropy_coef:
            pf = params_new.full_probs(s.key, s.vocab)
            logp = np.log(pf)
            if kl_coef:
                zr = (params_ref.get_logits(s.key, s.vocab) if params_ref is not None else np.zeros_like(z)) / T
                logq = zr - zr.max() - np.log(np.exp(zr - zr.max()).sum())
                kl = float(np.sum(pf * (logp - logq)))
                kl_total += s.weight * kl
                g -= s.weight * kl_coef * pf * (logp - logq - kl) / T
            if entropy_coef:
                h = -float(np.sum(pf * logp))
                ent_total += s.weight * h
                g -= s.weight * entropy_coef * pf * (logp + h) / T
    value = surr_total - kl_coef * kl_total + entropy_coef * ent_total
    return ObjectiveResult(value, surr_total, kl_total, ent_total, grad)
