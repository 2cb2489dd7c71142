"""Scoring of extracted topics: aligned forward KL divergence against ground
truth, and intrinsic coherence from sliding-window co-occurrence.

The divergence path matches each true topic to its closest extracted topic
(with replacement) and averages; the coherence path scores each topic's top
words by the indirect cosine over NPMI context vectors, with probabilities
taken from Boolean sliding windows over the token sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, Corpus, ParameterError


class DivergenceError(ValueError):
    """Forward KLD is infinite: the estimate has a zero where truth has mass."""


def kld(p, q) -> float:
    """Forward Kullback-Leibler divergence sum_i p_i ln(p_i / q_i), in nats.

    Terms with p_i = 0 contribute nothing; a q_i = 0 under p_i > 0 raises
    (smooth the estimate first).  Tiny negative rounding is clamped to 0.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ParameterError(f"p and q must be 1-d vectors of equal length: {p.shape} vs {q.shape}")
    if np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-6:
        raise ParameterError("p must be a probability vector")
    mask = p > 0.0
    if np.any(q[mask] <= 0.0):
        raise DivergenceError("q has zero mass where p is positive; smoothing disabled")
    val = float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    return val if val > 0.0 else 0.0


def smooth_distribution(q, epsilon: float = 1e-12) -> np.ndarray:
    """Add epsilon everywhere and renormalize; result is strictly positive."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1 or q.size == 0:
        raise ParameterError("q must be a nonempty 1-d vector")
    if np.any(q < 0.0):
        raise ParameterError("q must be nonnegative")
    if epsilon < 0.0:
        raise ParameterError("epsilon must be nonnegative")
    s = q + epsilon
    total = s.sum()
    if total <= 0.0:
        raise ParameterError("q must not be all zero")
    return s / total


@dataclass
class EvalReport:
    """Matched per-truth-topic divergences and their mean."""

    alignment: dict[int, int]
    per_topic_kld: np.ndarray
    average_kld: float


def align_topics(truth_phi, fit_phi, epsilon: float = 1e-12) -> EvalReport:
    """Match every ground-truth topic to its KLD-closest extracted topic.

    Matching is with replacement: an extracted topic may serve several truth
    topics.  Ties break toward the lowest extracted index.
    """
    truth = np.atleast_2d(np.asarray(truth_phi, dtype=np.float64))
    fit = np.atleast_2d(np.asarray(fit_phi, dtype=np.float64))
    if truth.shape[1] != fit.shape[1]:
        raise ParameterError(
            f"vocabulary mismatch: truth has {truth.shape[1]} columns, fit has {fit.shape[1]}"
        )
    if truth.shape[0] == 0 or fit.shape[0] == 0:
        raise ParameterError("both matrices need at least one row")

    smoothed = np.stack([smooth_distribution(row, epsilon) for row in fit])
    alignment: dict[int, int] = {}
    per_topic = np.zeros(truth.shape[0], dtype=np.float64)
    for t, p in enumerate(truth):
        divs = np.array([kld(p, q) for q in smoothed])
        best = int(np.argmin(divs))
        alignment[t] = best
        per_topic[t] = divs[best]
    return EvalReport(
        alignment=alignment, per_topic_kld=per_topic, average_kld=float(per_topic.mean())
    )


# ---------------------------------------------------------------------------
# coherence

@dataclass(frozen=True)
class CoherenceConfig:
    top_n: int = 10
    window: int = 110
    epsilon: float = 1e-12

    def __post_init__(self):
        if self.top_n < 1:
            raise ConfigurationError("top_n must be at least 1")
        if self.window < 1:
            raise ConfigurationError("window must be at least 1")
        if self.epsilon <= 0.0:
            raise ConfigurationError("epsilon must be positive")


@dataclass
class WindowStats:
    """Boolean sliding-window occurrence counts over a whole corpus."""

    window: int
    n_windows: int
    occur: np.ndarray    # (V,) windows containing each word
    cooccur: np.ndarray  # (V, V) windows containing both words

    def p_single(self, i: int) -> float:
        return self.occur[i] / self.n_windows

    def p_pair(self, i: int, j: int) -> float:
        return self.cooccur[i, j] / self.n_windows


def build_window_stats(corpus: Corpus, window: int) -> WindowStats:
    """Count word presence over all width-`window` windows at stride 1.

    Documents shorter than the window contribute a single window.
    """
    if window < 1:
        raise ParameterError("window must be at least 1")
    V = corpus.V
    presence_blocks = []
    for doc in corpus.docs:
        n = len(doc)
        if n == 0:
            continue
        if n <= window:
            row = np.zeros((1, V), dtype=np.float64)
            row[0, np.unique(doc)] = 1.0
            presence_blocks.append(row)
        else:
            onehot = np.zeros((n, V), dtype=np.int32)
            onehot[np.arange(n), doc] = 1
            cum = np.zeros((n + 1, V), dtype=np.int32)
            np.cumsum(onehot, axis=0, out=cum[1:])
            in_window = cum[window:] - cum[:-window]
            presence_blocks.append((in_window > 0).astype(np.float64))
    if not presence_blocks:
        raise ParameterError("corpus has no tokens; cannot build window statistics")
    presence = np.concatenate(presence_blocks, axis=0)
    return WindowStats(
        window=window,
        n_windows=presence.shape[0],
        occur=presence.sum(axis=0),
        cooccur=presence.T @ presence,
    )


def npmi(i: int, j: int, stats: WindowStats, epsilon: float = 1e-12) -> float:
    """Normalized pointwise mutual information from window frequencies.

    Words with zero marginal probability are floored at epsilon; a pair
    present in every window scores 1 (perfect association).  The value is
    clamped to [-1, 1].
    """
    p_i = stats.p_single(i) or epsilon
    p_j = stats.p_single(j) or epsilon
    p_ij = stats.p_pair(i, j)
    if p_ij >= 1.0:
        return 1.0
    val = math.log((p_ij + epsilon) / (p_i * p_j)) / -math.log(p_ij + epsilon)
    return min(1.0, max(-1.0, val))


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def top_words(phi_row: np.ndarray, top_n: int) -> np.ndarray:
    """Indices of the top_n highest-probability words, ties toward low index."""
    return np.argsort(-phi_row, kind="stable")[:top_n]


def cv_score(
    fit_phi,
    corpus: Corpus,
    config: CoherenceConfig = CoherenceConfig(),
    stats: WindowStats | None = None,
) -> tuple[np.ndarray, float]:
    """Coherence of each topic's top words plus the mean over topics.

    For every topic: take the top words, build each word's NPMI context
    vector against the full top-word set, and average the cosine between
    each vector and the elementwise sum vector of the set.
    """
    fit = np.atleast_2d(np.asarray(fit_phi, dtype=np.float64))
    if config.top_n > corpus.V:
        raise ParameterError(f"top_n={config.top_n} exceeds vocabulary size {corpus.V}")
    if stats is None:
        stats = build_window_stats(corpus, config.window)

    scores = np.zeros(fit.shape[0], dtype=np.float64)
    for t, row in enumerate(fit):
        top = top_words(row, config.top_n)
        n = len(top)
        context = np.empty((n, n), dtype=np.float64)
        for a in range(n):
            for b in range(n):
                context[a, b] = npmi(int(top[a]), int(top[b]), stats, config.epsilon)
        set_vector = context.sum(axis=0)
        segment_scores = [_cosine(context[a], set_vector) for a in range(n)]
        scores[t] = float(np.mean(segment_scores))
    return scores, float(scores.mean())
