"""Tabular autoregressive softmax policies over the text action grammar."""

from __future__ import annotations

import copy
import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .games import GameState, format_answer

Vocab = tuple[str, ...]


def decision_key(observation: str, prefix: str = "") -> str:
    """Stable hash of the text a decision conditions on."""
    return hashlib.sha1(f"{observation}\x1f{prefix}".encode()).hexdigest()


@dataclass(frozen=True)
class Emission:
    """One turn's output: the raw text plus per-token bookkeeping."""

    text: str
    tokens: tuple[str, ...]
    logprobs: tuple[float, ...]
    decisions: tuple[tuple[str, Vocab], ...] = ()  # (decision key, vocabulary) per token

    @property
    def length(self) -> int:
        return len(self.tokens)


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def truncation_mask(probs: np.ndarray, top_k: int = 0, top_p: float = 1.0) -> np.ndarray:
    """Support kept by top-k then nucleus truncation; ``top_k=0`` and ``top_p=1`` disable each."""
    order = np.argsort(-probs, kind="stable")
    keep = np.zeros(len(probs), dtype=bool)
    n = len(probs) if top_k <= 0 else min(top_k, len(probs))
    if top_p < 1.0:
        cum = np.cumsum(probs[order[:n]]) / probs[order[:n]].sum()
        n = int(np.searchsorted(cum, top_p - 1e-12) + 1)
    keep[order[:n]] = True
    return keep


def continuation_vocab(legal: Sequence[str], prefix: str) -> Vocab:
    seen: dict[str, None] = {}
    for a in legal:
        if a.startswith(prefix) and len(a) > len(prefix):
            seen.setdefault(a[len(prefix)], None)
    return tuple(seen)


@dataclass
class TabularPolicy:
    """Softmax policy with one logit vector per decision point.

    A decision point is an observation (single-token mode, vocabulary = the
    legal actions) or an observation plus a character prefix (multi-token
    mode, vocabulary = the characters that continue some legal action).
    Unvisited decision points behave as all-zero logits.
    """

    multi_token: bool = False
    temperature: float = 0.6
    top_p: float = 1.0
    top_k: int = 0
    logits: dict[str, np.ndarray] = field(default_factory=dict)
    vocab: dict[str, Vocab] = field(default_factory=dict)

    def copy(self) -> "TabularPolicy":
        return copy.deepcopy(self)

    def get_logits(self, key: str, vocab: Vocab) -> np.ndarray:
        z = self.logits.get(key)
        return np.zeros(len(vocab)) if z is None else z

    def ensure(self, key: str, vocab: Vocab) -> np.ndarray:
        if key not in self.logits:
            self.logits[key] = np.zeros(len(vocab))
            self.vocab[key] = tuple(vocab)
        return self.logits[key]

    # -- distributions -----------------------------------------------------------

    def full_probs(self, key: str, vocab: Vocab) -> np.ndarray:
        """Temperature-scaled distribution over the whole vocabulary, no truncation."""
        z = self.get_logits(key, vocab)
        if self.temperature <= 0:
            out = np.zeros(len(vocab))
            out[int(np.argmax(z))] = 1.0
            return out
        return softmax(z / self.temperature)

    def support(self, key: str, vocab: Vocab) -> np.ndarray:
        return truncation_mask(self.full_probs(key, vocab), self.top_k, self.top_p)

    def probs(self, key: str, vocab: Vocab, support: Optional[np.ndarray] = None) -> np.ndarray:
        """Sampling distribution: renormalized over the truncation support."""
        p = self.full_probs(key, vocab)
        if support is None:
            support = truncation_mask(p, self.top_k, self.top_p)
        p = np.where(support, p, 0.0)
        return p / p.sum()

    def action_probs(self, observation: str, legal: Sequence[str]) -> dict[str, float]:
        """Marginal probability of each legal action string."""
        if not self.multi_token:
            key = decision_key(observation)
            return dict(zip(legal, self.probs(key, tuple(legal))))
        out: dict[str, float] = {}
        stack = [("", 1.0)]
        while stack:
            prefix, mass = stack.pop()
            if prefix in legal:
                out[prefix] = out.get(prefix, 0.0) + mass
                continue
            vocab = continuation_vocab(legal, prefix)
            p = self.probs(decision_key(observation, prefix), vocab)
            stack.extend((prefix + t, mass * q) for t, q in zip(vocab, p) if q > 0)
        return {a: out.get(a, 0.0) for a in legal}

    # -- sampling ----------------------------------------------------------------

    def _draw(self, key: str, vocab: Vocab, rng: np.random.Generator) -> tuple[int, float]:
        p = self.probs(key, vocab)
        u = rng.random()
        idx = int(np.searchsorted(np.cumsum(p), u, side="right"))
        idx = min(idx, len(p) - 1)
        while p[idx] == 0.0:  # guard against float round-off at the top of the cdf
            idx -= 1
        return idx, float(np.log(p[idx]))

    def sample(self, observation: str, legal: Sequence[str], rng: np.random.Generator) -> Emission:
        legal = list(legal)
        if not legal:
            raise ValueError("no legal actions to sample from")
        if not self.multi_token:
            vocab = tuple(legal)
            key = decision_key(observation)
            idx, lp = self._draw(key, vocab, rng)
            return Emission(format_answer(legal[idx]), (legal[idx],), (lp,), ((key, vocab),))
        prefix, tokens, lps, decisions = "", [], [], []
        while prefix not in legal:
            vocab = continuation_vocab(legal, prefix)
            key = decision_key(observation, prefix)
            idx, lp = self._draw(key, vocab, rng)
            tokens.append(vocab[idx])
            lps.append(lp)
            decisions.append((key, vocab))
            prefix += vocab[idx]
        return Emission(format_answer(prefix), tuple(tokens), tuple(lps), tuple(decisions))

    def act(self, state: GameState, rng: np.random.Generator) -> Emission:
        return self.sample(state.observe(state.player), state.legal_actions(), rng)

    def state_action_probs(self, state: GameState) -> dict[str, float]:
        return self.action_probs(state.observe(state.player), state.legal_actions())

    def greedy(self) -> "TabularPolicy":
        out = copy.copy(self)
        out.temperature = 0.0
        return out


def recompute_logprobs(policy: TabularPolicy, emission: Emission) -> tuple[float, ...]:
    """Log-probabilities of ``emission``'s tokens under ``policy``."""
    out = []
    for tok, (key, vocab) in zip(emission.tokens, emission.decisions):
        p = policy.probs(key, vocab)
        out.append(float(np.log(p[vocab.index(tok)])))
    return tuple(out)


def kl_divergence(a: TabularPolicy, b: TabularPolicy, points: Sequence[tuple[str, Vocab]],
                  weights: Optional[Sequence[float]] = None) -> float:
    """Weighted mean of exact categorical KL(a || b) over decision points."""
    if not points:
        return 0.0
    w = np.full(len(points), 1.0 / len(points)) if weights is None else np.asarray(weights, dtype=float)
    total = 0.0
    for (key, vocab), wi in zip(points, w):
        p, q = a.full_probs(key, vocab), b.full_probs(key, vocab)
        nz = p > 0
        total += wi * float(np.sum(p[nz] * (np.log(p[nz]) - np.log(q[nz]))))
    return total
