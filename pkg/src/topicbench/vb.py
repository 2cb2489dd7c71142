"""Batch mean-field variational Bayes for smoothed LDA.

Coordinate ascent on the factorized posterior q(theta) q(topics) q(z):
per-document responsibilities and gamma are iterated to local convergence
holding lambda fixed, then lambda is updated from all responsibilities.  The
evidence lower bound is evaluated after every epoch and must never decrease;
that monotonicity is the primary correctness check on the updates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, psi

from .core import (
    ConfigurationError,
    ConsistencyError,
    Corpus,
    DirichletHyperparams,
    FitResult,
    ParameterError,
    make_rng,
)

# relative ELBO improvement below which the epoch loop stops early
EPOCH_REL_TOL = 1e-6

# scale of the uniform perturbations added to beta when initializing lambda;
# kept small so the starting topics are nearly symmetric
INIT_PERTURBATION_SCALE = 0.01


@dataclass(frozen=True)
class VbConfig:
    K: int
    hyper: DirichletHyperparams = field(default_factory=lambda: DirichletHyperparams(0.5, 0.5))
    epochs: int = 150
    inner_doc_iters: int = 50
    doc_convergence_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ConfigurationError("K must be at least 1")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be at least 1")
        if self.inner_doc_iters < 1:
            raise ConfigurationError("inner_doc_iters must be at least 1")
        if self.doc_convergence_tol <= 0.0:
            raise ConfigurationError("doc_convergence_tol must be positive")


@dataclass
class VariationalState:
    """Variational Dirichlet parameters plus the per-epoch ELBO trace."""

    lam: np.ndarray    # (K, V) word-topic parameters, entries >= beta
    gamma: np.ndarray  # (M, K) document-topic parameters, entries >= alpha
    elbo_trace: list[float] = field(default_factory=list)


def doc_term_matrix(corpus: Corpus) -> np.ndarray:
    """Dense (M, V) token count matrix."""
    counts = np.zeros((corpus.M, corpus.V), dtype=np.float64)
    for m, doc in enumerate(corpus.docs):
        if len(doc):
            counts[m] = np.bincount(doc, minlength=corpus.V)
    return counts


def _dirichlet_elog(param: np.ndarray) -> np.ndarray:
    """E[log x] under a Dirichlet with the given (rows of) parameters."""
    return psi(param) - psi(param.sum(axis=1))[:, None]


def _responsibilities(elog_theta: np.ndarray, elog_beta: np.ndarray):
    """Optimal token responsibilities for every (doc, word) pair.

    Returns the (M, K, V) normalized responsibility tensor and the (M, V)
    log-normalizers.  Computed in log space with max-subtraction.
    """
    log_r = elog_theta[:, :, None] + elog_beta[None, :, :]
    shift = log_r.max(axis=1)
    r = np.exp(log_r - shift[:, None, :])
    norm = r.sum(axis=1)
    r /= norm[:, None, :]
    return r, shift + np.log(norm)


def _doc_pass(
    counts: np.ndarray,
    gamma: np.ndarray,
    elog_beta: np.ndarray,
    alpha: float,
    inner_iters: int,
    tol: float,
) -> np.ndarray:
    """Iterate (responsibilities, gamma) per document until the normalized
    mixture stops moving; documents converge and drop out independently."""
    gamma = gamma.copy()
    active = np.arange(counts.shape[0])
    for _ in range(inner_iters):
        if active.size == 0:
            break
        sub_counts = counts[active]
        elog_theta = _dirichlet_elog(gamma[active])
        r, _ = _responsibilities(elog_theta, elog_beta)
        gamma_new = alpha + np.einsum("akv,av->ak", r, sub_counts)

        old_mix = gamma[active] / gamma[active].sum(axis=1)[:, None]
        new_mix = gamma_new / gamma_new.sum(axis=1)[:, None]
        change = np.abs(new_mix - old_mix).mean(axis=1)
        gamma[active] = gamma_new
        active = active[change >= tol]
    return gamma


def _bound(
    counts: np.ndarray,
    gamma: np.ndarray,
    lam: np.ndarray,
    hyper: DirichletHyperparams,
) -> float:
    """Evidence lower bound at (gamma, lambda), with token responsibilities
    at their optimum given the state."""
    alpha, beta = hyper.alpha, hyper.beta
    K, V = lam.shape
    M = gamma.shape[0]

    elog_beta = _dirichlet_elog(lam)
    total = 0.0
    if M:
        elog_theta = _dirichlet_elog(gamma)
        _, log_norm = _responsibilities(elog_theta, elog_beta)
        total += float((counts * log_norm).sum())
        # document-topic Dirichlet terms: prior expectation minus q entropy
        total += float(((alpha - gamma) * elog_theta).sum())
        total += float(gammaln(gamma).sum() - gammaln(gamma.sum(axis=1)).sum())
        total += M * float(gammaln(K * alpha) - K * gammaln(alpha))
    # word-topic Dirichlet terms
    total += float(((beta - lam) * elog_beta).sum())
    total += float(gammaln(lam).sum() - gammaln(lam.sum(axis=1)).sum())
    total += K * float(gammaln(V * beta) - V * gammaln(beta))
    return total


def compute_elbo(corpus: Corpus, state: VariationalState, hyper: DirichletHyperparams) -> float:
    """Evidence lower bound of the given state on the given corpus."""
    K, V = state.lam.shape
    if state.gamma.shape != (corpus.M, K):
        raise ParameterError(
            f"gamma shape {state.gamma.shape} does not match corpus/topic dimensions {(corpus.M, K)}"
        )
    if V != corpus.V:
        raise ParameterError(f"lambda has {V} columns, corpus vocabulary is {corpus.V}")
    counts = doc_term_matrix(corpus)
    value = _bound(counts, state.gamma, state.lam, hyper)
    if not np.isfinite(value):
        raise ConsistencyError(f"ELBO is not finite: {value}")
    return value


def vb_fit_with_state(corpus: Corpus, config: VbConfig) -> tuple[FitResult, VariationalState]:
    """Run coordinate ascent and return the fit plus the variational state."""
    if corpus.M == 0 or corpus.total_tokens() == 0:
        raise ParameterError("corpus must contain at least one token")
    t_start = time.perf_counter()

    K = config.K
    alpha, beta = config.hyper.alpha, config.hyper.beta
    counts = doc_term_matrix(corpus)
    lengths = counts.sum(axis=1)

    rng = make_rng(config.seed)
    # small positive perturbations break the topic symmetry of the prior
    lam = beta + rng.random((K, corpus.V))
    gamma = alpha + np.repeat((lengths / K)[:, None], K, axis=1)

    trace: list[float] = []
    prev = -np.inf
    epochs_run = 0
    for _ in range(config.epochs):
        epochs_run += 1
        gamma = _doc_pass(
            counts, gamma, _dirichlet_elog(lam), alpha, config.inner_doc_iters,
            config.doc_convergence_tol,
        )
        r, _ = _responsibilities(_dirichlet_elog(gamma), _dirichlet_elog(lam))
        lam = beta + np.einsum("mkv,mv->kv", r, counts)

        elbo = _bound(counts, gamma, lam, config.hyper)
        trace.append(elbo)
        if np.isfinite(prev) and elbo - prev < EPOCH_REL_TOL * abs(prev):
            break
        prev = elbo

    state = VariationalState(lam=lam, gamma=gamma, elbo_trace=trace)
    fit = FitResult(
        phi_hat=lam / lam.sum(axis=1)[:, None],
        theta_hat=gamma / gamma.sum(axis=1)[:, None],
        algorithm="vb",
        iterations=epochs_run,
        wall_seconds=time.perf_counter() - t_start,
        seed=config.seed,
    )
    return fit, state


def vb_fit(corpus: Corpus, config: VbConfig) -> FitResult:
    """Mean-field fit; see `vb_fit_with_state` for the diagnostic variant."""
    fit, _ = vb_fit_with_state(corpus, config)
    return fit
