"""Shared numeric primitives, seeded sampling, and the LDA domain types.

All randomness in the package flows through a single explicit 64-bit seed.
Streams are split with numpy ``SeedSequence`` spawn keys and realized as
Philox (counter-based) generators, so every corpus, chain, and fit is
bit-reproducible across runs and machines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .simgen import GeneratorConfig

MAX_SEED = 2**64 - 1


class ParameterError(ValueError):
    """An operation received arguments outside its contract."""


class ConfigurationError(ParameterError):
    """A configuration object violates one of its invariants."""


class ConsistencyError(RuntimeError):
    """Internal bug trap: derived bookkeeping state diverged from first principles."""


# ---------------------------------------------------------------------------
# randomness

def derive_seed(seed: int, *key: int) -> int:
    """Derive a child 64-bit seed from a parent seed and an integer key path.

    Stable across runs and platforms; used to hand out independent seeds for
    group members, chains, and experiment jobs.
    """
    _check_seed(seed)
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for the independent stream named by (seed, *key)."""
    _check_seed(seed)
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _check_seed(seed: int) -> None:
    if not (0 <= int(seed) <= MAX_SEED):
        raise ParameterError(f"seed must be in [0, 2^64): got {seed}")


# ---------------------------------------------------------------------------
# sampling primitives

def sample_dirichlet(concentration, rng: np.random.Generator) -> np.ndarray:
    """Draw a probability vector from a Dirichlet distribution.

    Per-component Gamma draws followed by normalization.  For shapes < 1 the
    log-space boost Gamma(a) = Gamma(a+1) * U^(1/a) is used so tiny
    concentrations do not underflow to an all-zero draw.
    """
    c = np.asarray(concentration, dtype=np.float64)
    if c.ndim != 1 or c.size == 0:
        raise ParameterError("concentration must be a nonempty 1-d vector")
    if not np.all(c > 0.0):
        raise ParameterError("Dirichlet concentrations must all be positive")
    if np.all(c >= 1.0):
        g = rng.standard_gamma(c)
    else:
        g = rng.standard_gamma(c + 1.0)
        u = rng.random(c.size)
        logs = np.log(g) + np.log(u) / c
        logs -= logs.max()
        g = np.exp(logs)
    p = g / g.sum()
    # explicit renormalization: the simplex invariant is 1e-12, not "close"
    return p / p.sum()


def sample_categorical(p, rng: np.random.Generator) -> int:
    """Draw an index from a categorical distribution given as a vector.

    The returned index always has strictly positive mass.
    """
    q = np.asarray(p, dtype=np.float64)
    if q.ndim != 1 or q.size == 0:
        raise ParameterError("p must be a nonempty 1-d vector")
    if np.any(q < 0.0):
        raise ParameterError("categorical probabilities must be nonnegative")
    total = float(q.sum())
    if abs(total - 1.0) > 1e-9:
        raise ParameterError(f"categorical probabilities must sum to 1, got {total!r}")
    cum = np.cumsum(q)
    r = rng.random() * total
    idx = int(np.searchsorted(cum, r, side="right"))
    return min(idx, q.size - 1)


def circular_distance(a: int, b: int, span: int) -> int:
    """Shortest distance between two positions on a circle of `span` slots."""
    if span < 1:
        raise ParameterError("span must be a positive integer")
    if not (0 <= a < span and 0 <= b < span):
        raise ParameterError(f"indices must lie in [0, {span}): got {a}, {b}")
    d = abs(int(a) - int(b))
    return min(d, span - d)


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class Vocabulary:
    """Word-index space: `size` distinct indices, with a half-open sub-range
    reserved for function words."""

    size: int
    function_block: tuple[int, int] = (0, 0)

    def __post_init__(self):
        lo, hi = self.function_block
        if self.size < 2:
            raise ConfigurationError("vocabulary size must be at least 2")
        if not (0 <= lo <= hi <= self.size):
            raise ConfigurationError(
                f"function block {self.function_block} must be a sub-range of [0, {self.size})"
            )

    @property
    def function_size(self) -> int:
        return self.function_block[1] - self.function_block[0]

    @property
    def content_size(self) -> int:
        return self.size - self.function_size


@dataclass(frozen=True)
class DirichletHyperparams:
    """Symmetric concentrations: alpha for document-topic, beta for word-topic."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ConfigurationError(
                f"Dirichlet hyperparameters must be positive: alpha={self.alpha}, beta={self.beta}"
            )


@dataclass
class GroundTruthModel:
    """The true distributions a synthetic corpus was sampled from."""

    phi: np.ndarray    # (K, V) word-topic rows
    theta: np.ndarray  # (M, K) document-topic rows
    K: int
    includes_function_topic: bool = True

    def validate(self, atol: float = 1e-12) -> None:
        for name, mat in (("phi", self.phi), ("theta", self.theta)):
            if mat.size and np.any(mat < 0.0):
                raise ConsistencyError(f"{name} has negative entries")
            if mat.shape[0] and np.max(np.abs(mat.sum(axis=1) - 1.0)) > atol:
                raise ConsistencyError(f"{name} rows do not sum to 1 within {atol}")
        if self.phi.shape[0] != self.K or (self.theta.size and self.theta.shape[1] != self.K):
            raise ConsistencyError("topic count disagrees between phi, theta, and K")


@dataclass
class Corpus:
    """Ordered token-index documents plus the vocabulary and generation provenance."""

    docs: list[np.ndarray]
    vocab: Vocabulary
    seed: int
    gen_params: "GeneratorConfig | None" = None

    @property
    def M(self) -> int:
        return len(self.docs)

    @property
    def V(self) -> int:
        return self.vocab.size

    def doc_lengths(self) -> np.ndarray:
        return np.array([len(d) for d in self.docs], dtype=np.int64)

    def total_tokens(self) -> int:
        return int(sum(len(d) for d in self.docs))

    def validate(self) -> None:
        for m, doc in enumerate(self.docs):
            if len(doc) and (doc.min() < 0 or doc.max() >= self.V):
                raise ConsistencyError(f"document {m} has token indices outside [0, {self.V})")
            if self.gen_params is not None and len(doc) != self.gen_params.N:
                raise ConsistencyError(
                    f"document {m} has {len(doc)} tokens, config says {self.gen_params.N}"
                )


def recount(z: list[np.ndarray], corpus: Corpus, K: int):
    """Tally the three count matrices implied by topic labels `z` from scratch.

    Returns (count_doc_topic, count_topic_word, count_topic).
    """
    if len(z) != corpus.M:
        raise ParameterError("z must have one label array per document")
    V = corpus.V
    n_mk = np.zeros((corpus.M, K), dtype=np.int64)
    n_kv = np.zeros((K, V), dtype=np.int64)
    n_k = np.zeros(K, dtype=np.int64)
    for m, (labels, doc) in enumerate(zip(z, corpus.docs)):
        if len(labels) != len(doc):
            raise ParameterError(f"z[{m}] length {len(labels)} != document length {len(doc)}")
        if len(labels) and (labels.min() < 0 or labels.max() >= K):
            raise ParameterError(f"z[{m}] has labels outside [0, {K})")
        np.add.at(n_mk[m], labels, 1)
        np.add.at(n_kv, (labels, doc), 1)
        np.add.at(n_k, labels, 1)
    return n_mk, n_kv, n_k


@dataclass
class Assignments:
    """Per-token topic labels with their incrementally maintained count matrices."""

    z: list[np.ndarray]
    count_doc_topic: np.ndarray   # (M, K)
    count_topic_word: np.ndarray  # (K, V)
    count_topic: np.ndarray       # (K,)

    @classmethod
    def from_z(cls, z: list[np.ndarray], corpus: Corpus, K: int) -> "Assignments":
        n_mk, n_kv, n_k = recount(z, corpus, K)
        return cls(z=z, count_doc_topic=n_mk, count_topic_word=n_kv, count_topic=n_k)

    @classmethod
    def zeros(cls, M: int, K: int, V: int) -> "Assignments":
        return cls(
            z=[np.zeros(0, dtype=np.int64) for _ in range(M)],
            count_doc_topic=np.zeros((M, K), dtype=np.int64),
            count_topic_word=np.zeros((K, V), dtype=np.int64),
            count_topic=np.zeros(K, dtype=np.int64),
        )

    def check_against(self, corpus: Corpus) -> None:
        """Raise ConsistencyError unless the counts equal a from-scratch recount."""
        K = self.count_topic_word.shape[0]
        n_mk, n_kv, n_k = recount(self.z, corpus, K)
        if not (
            np.array_equal(n_mk, self.count_doc_topic)
            and np.array_equal(n_kv, self.count_topic_word)
            and np.array_equal(n_k, self.count_topic)
        ):
            raise ConsistencyError("count matrices disagree with a recount of z")


@dataclass
class FitResult:
    """An inference algorithm's estimates plus run metadata."""

    phi_hat: np.ndarray    # (K, V) row-stochastic
    theta_hat: np.ndarray  # (M, K) row-stochastic
    algorithm: str
    iterations: int
    wall_seconds: float
    seed: int = 0

    def validate(self, atol: float = 1e-10) -> None:
        for name, mat in (("phi_hat", self.phi_hat), ("theta_hat", self.theta_hat)):
            if mat.size == 0:
                continue
            if np.any(mat <= 0.0):
                raise ConsistencyError(f"{name} must be strictly positive")
            if np.max(np.abs(mat.sum(axis=1) - 1.0)) > atol:
                raise ConsistencyError(f"{name} rows do not sum to 1 within {atol}")
