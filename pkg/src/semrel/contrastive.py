"""Desk-scale contrastive objectives: temperature-scaled triplet loss,
token corruption, and reconstruction cross-entropy."""

import math
from dataclasses import dataclass

import numpy as np

from . import vecmath
from .corpus import TokenizedSentence
from .errors import (
    EmptyInput,
    LengthMismatch,
    NonPositiveTau,
    NotADistribution,
    VocabMiss,
)
from .vecmath import SentenceEmbedding

DEFAULT_TAU = 0.05
DEFAULT_CORRUPTION_RATIO = 0.6


@dataclass(frozen=True)
class TripletBatch:
    h: SentenceEmbedding
    h_plus: SentenceEmbedding
    h_minus: SentenceEmbedding
    tau: float = DEFAULT_TAU


@dataclass(frozen=True)
class CorruptionConfig:
    mode: str = "delete"  # delete | mask
    ratio: float = DEFAULT_CORRUPTION_RATIO
    mask_token: str = "[MASK]"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("delete", "mask"):
            raise ValueError(f"unknown corruption mode {self.mode!r}")
        if not (0.0 < self.ratio < 1.0):
            raise ValueError("ratio must be in (0, 1)")


def simcse_loss(batch: TripletBatch) -> float:
    """Two-term softmax cross-entropy pulling h toward h+ and away from h-.

    -log(e^{s+/tau} / (e^{s+/tau} + e^{s-/tau})), stabilized as
    log1p(exp((s- - s+)/tau)).
    """
    if batch.tau <= 0.0:
        raise NonPositiveTau(f"tau={batch.tau}")
    s_plus = vecmath.cosine(batch.h, batch.h_plus)
    s_minus = vecmath.cosine(batch.h, batch.h_minus)
    return float(np.logaddexp(0.0, (s_minus - s_plus) / batch.tau))


def simcse_loss_inbatch(anchors, positives, tau: float = DEFAULT_TAU) -> float:
    """In-batch-negatives extension: for anchor i the denominator runs over
    every positive in the batch, not just its own negative. Goes beyond the
    two-term triplet form."""
    if tau <= 0.0:
        raise NonPositiveTau(f"tau={tau}")
    if len(anchors) != len(positives):
        raise LengthMismatch("anchors and positives differ in length")
    if not anchors:
        raise EmptyInput("empty batch")
    n = len(anchors)
    sims = np.array(
        [[vecmath.cosine(a, p) for p in positives] for a in anchors]
    ) / tau
    # -log softmax of the matching positive, per row
    row_max = sims.max(axis=1, keepdims=True)
    log_z = row_max[:, 0] + np.log(np.exp(sims - row_max).sum(axis=1))
    return float(np.mean(log_z - np.diag(sims)))


def corrupt(tokens: TokenizedSentence, cfg: CorruptionConfig) -> TokenizedSentence:
    """Delete or mask ceil(ratio*n) tokens at seeded-random positions.

    Order is preserved and at least one original token always survives.
    """
    toks = list(tokens.tokens)
    n = len(toks)
    if n == 0:
        raise EmptyInput("cannot corrupt an empty sentence")
    count = min(math.ceil(cfg.ratio * n), n - 1)
    rng = np.random.default_rng(cfg.seed)
    hit = set(rng.choice(n, size=count, replace=False).tolist())
    if cfg.mode == "delete":
        out = [t for i, t in enumerate(toks) if i not in hit]
    else:
        out = [cfg.mask_token if i in hit else t for i, t in enumerate(toks)]
    return TokenizedSentence(out)


def reconstruction_loss(original: TokenizedSentence, predicted_distributions) -> float:
    """Mean token-level cross-entropy of per-position vocabulary
    distributions against the original tokens.

    Each distribution is a mapping token -> probability summing to 1
    within 1e-6.
    """
    toks = original.tokens
    if len(toks) != len(predicted_distributions):
        raise LengthMismatch(
            f"{len(toks)} tokens vs {len(predicted_distributions)} distributions"
        )
    if not toks:
        raise EmptyInput("empty sentence")
    total = 0.0
    for tok, dist in zip(toks, predicted_distributions):
        mass = sum(dist.values())
        if abs(mass - 1.0) > 1e-6 or any(p < 0 for p in dist.values()):
            raise NotADistribution(f"probabilities sum to {mass}")
        p = dist.get(tok, 0.0)
        if p <= 0.0:
            raise VocabMiss(tok)
        total += -math.log(p)
    return total / len(toks)
