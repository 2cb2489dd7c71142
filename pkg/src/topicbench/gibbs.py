"""Collapsed Gibbs sampling for smoothed LDA.

Per-token resampling from the collapsed full conditional
p(z = k) ~ (n_mk + alpha) * (n_kv + beta) / (n_k + V*beta), with counts
excluding the current token.  The sweep kernel is JIT-compiled; uniforms are
drawn per sweep from the chain's Philox stream so the whole chain is a pure
function of (corpus, config).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import (
    Assignments,
    ConfigurationError,
    ConsistencyError,
    Corpus,
    DirichletHyperparams,
    FitResult,
    ParameterError,
    make_rng,
    recount,
)


@dataclass(frozen=True)
class GibbsConfig:
    K: int
    hyper: DirichletHyperparams = field(default_factory=lambda: DirichletHyperparams(0.5, 0.5))
    iterations: int = 5000
    burn_in_fraction: float = 0.8
    thin: int = 10
    seed: int = 0
    use_final_state_only: bool = False

    def __post_init__(self):
        if self.K < 1:
            raise ConfigurationError("K must be at least 1")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be at least 1")
        if not (0.0 <= self.burn_in_fraction < 1.0):
            raise ConfigurationError("burn_in_fraction must lie in [0, 1)")
        if self.thin < 1:
            raise ConfigurationError("thin must be at least 1")
        if not self.use_final_state_only and self.retained_samples() < 1:
            raise ConfigurationError(
                "no retained samples: need iterations * (1 - burn_in_fraction) >= thin"
            )

    def burn_iterations(self) -> int:
        return int(self.iterations * self.burn_in_fraction)

    def retained_samples(self) -> int:
        return (self.iterations - self.burn_iterations()) // self.thin


def conditional_distribution(
    assignments: Assignments, m: int, v: int, hyper: DirichletHyperparams
) -> np.ndarray:
    """Full-conditional topic distribution for one token, given counts that
    already exclude it (decrement-before-evaluate)."""
    n_mk = assignments.count_doc_topic
    n_kv = assignments.count_topic_word
    n_k = assignments.count_topic
    if n_mk[m].min() < 0 or n_kv[:, v].min() < 0 or n_k.min() < 0:
        raise ConsistencyError("excluded counts are negative; token was not decremented exactly once")
    V = n_kv.shape[1]
    p = (n_mk[m] + hyper.alpha) * (n_kv[:, v] + hyper.beta) / (n_k + V * hyper.beta)
    return p / p.sum()


@njit(cache=True)
def _sweep(words, doc_of, n_mk, n_kv, n_k, z, uniforms, alpha, beta):
    """One full sweep in document-major, position-minor order."""
    K = n_kv.shape[0]
    V = n_kv.shape[1]
    vbeta = V * beta
    probs = np.empty(K, dtype=np.float64)
    for i in range(words.shape[0]):
        v = words[i]
        m = doc_of[i]
        k_old = z[i]
        n_mk[m, k_old] -= 1
        n_kv[k_old, v] -= 1
        n_k[k_old] -= 1

        total = 0.0
        for k in range(K):
            p = (n_mk[m, k] + alpha) * (n_kv[k, v] + beta) / (n_k[k] + vbeta)
            probs[k] = p
            total += p

        r = uniforms[i] * total
        acc = 0.0
        k_new = K - 1
        for k in range(K):
            acc += probs[k]
            if r < acc:
                k_new = k
                break

        z[i] = k_new
        n_mk[m, k_new] += 1
        n_kv[k_new, v] += 1
        n_k[k_new] += 1


def _flatten(corpus: Corpus) -> tuple[np.ndarray, np.ndarray]:
    words = np.concatenate([d for d in corpus.docs]) if corpus.M else np.zeros(0, np.int64)
    doc_of = np.concatenate(
        [np.full(len(d), m, dtype=np.int64) for m, d in enumerate(corpus.docs)]
    ) if corpus.M else np.zeros(0, np.int64)
    return words.astype(np.int64), doc_of


def phi_estimate(n_kv: np.ndarray, n_k: np.ndarray, beta: float) -> np.ndarray:
    """Smoothed word-topic estimate from one count state."""
    V = n_kv.shape[1]
    return (n_kv + beta) / (n_k + V * beta)[:, None]


def theta_estimate(n_mk: np.ndarray, doc_lengths: np.ndarray, alpha: float) -> np.ndarray:
    """Smoothed document-topic estimate from one count state."""
    K = n_mk.shape[1]
    return (n_mk + alpha) / (doc_lengths + K * alpha)[:, None]


def gibbs_fit(corpus: Corpus, config: GibbsConfig) -> FitResult:
    """Run one collapsed Gibbs chain and return the sample-mean estimates.

    After burn-in, every `thin`-th state contributes a (phi, theta) sample;
    the returned estimates are running (Welford) means over those samples,
    which for identical samples reproduce them bit-exactly.
    """
    if corpus.M == 0 or corpus.total_tokens() == 0:
        raise ParameterError("corpus must contain at least one token")
    t_start = time.perf_counter()

    K = config.K
    alpha, beta = config.hyper.alpha, config.hyper.beta
    words, doc_of = _flatten(corpus)
    lengths = corpus.doc_lengths().astype(np.float64)

    rng = make_rng(config.seed)
    z = rng.integers(0, K, size=words.shape[0], dtype=np.int64)

    n_mk = np.zeros((corpus.M, K), dtype=np.int64)
    n_kv = np.zeros((K, corpus.V), dtype=np.int64)
    n_k = np.zeros(K, dtype=np.int64)
    np.add.at(n_mk, (doc_of, z), 1)
    np.add.at(n_kv, (z, words), 1)
    np.add.at(n_k, z, 1)

    burn = config.burn_iterations()
    phi_mean = np.zeros((K, corpus.V), dtype=np.float64)
    theta_mean = np.zeros((corpus.M, K), dtype=np.float64)
    n_samples = 0

    for it in range(1, config.iterations + 1):
        uniforms = rng.random(words.shape[0])
        _sweep(words, doc_of, n_mk, n_kv, n_k, z, uniforms, alpha, beta)
        if not config.use_final_state_only and it > burn and (it - burn) % config.thin == 0:
            n_samples += 1
            phi_mean += (phi_estimate(n_kv, n_k, beta) - phi_mean) / n_samples
            theta_mean += (theta_estimate(n_mk, lengths, alpha) - theta_mean) / n_samples

    if config.use_final_state_only:
        phi_mean = phi_estimate(n_kv, n_k, beta)
        theta_mean = theta_estimate(n_mk, lengths, alpha)

    return FitResult(
        phi_hat=phi_mean,
        theta_hat=theta_mean,
        algorithm="gibbs",
        iterations=config.iterations,
        wall_seconds=time.perf_counter() - t_start,
        seed=config.seed,
    )


def final_assignments(corpus: Corpus, config: GibbsConfig) -> Assignments:
    """Rerun the chain and return its final labeled state (diagnostics)."""
    if corpus.M == 0 or corpus.total_tokens() == 0:
        raise ParameterError("corpus must contain at least one token")
    words, doc_of = _flatten(corpus)
    rng = make_rng(config.seed)
    z = rng.integers(0, config.K, size=words.shape[0], dtype=np.int64)
    z_docs = _split(z, corpus)
    n_mk, n_kv, n_k = recount(z_docs, corpus, config.K)
    for _ in range(config.iterations):
        uniforms = rng.random(words.shape[0])
        _sweep(words, doc_of, n_mk, n_kv, n_k, z, uniforms, config.hyper.alpha, config.hyper.beta)
    return Assignments(
        z=_split(z, corpus), count_doc_topic=n_mk, count_topic_word=n_kv, count_topic=n_k
    )


def _split(z: np.ndarray, corpus: Corpus) -> list[np.ndarray]:
    out, pos = [], 0
    for d in corpus.docs:
        out.append(z[pos : pos + len(d)].copy())
        pos += len(d)
    return out
