"""Synthetic corpus generation from known LDA ground truth.

Content topics live on a circular arrangement of the content portion of the
vocabulary, each a Laplace- or Gaussian-shaped bump around an evenly spaced
center.  One extra flat topic over a reserved, disjoint block of function
words is mixed into every document, playing the role of stop words.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    ConfigurationError,
    Corpus,
    GroundTruthModel,
    ParameterError,
    Vocabulary,
    derive_seed,
    make_rng,
    sample_categorical,
    sample_dirichlet,
)

SHAPES = ("laplace", "gaussian")

# spawn-key namespaces so document streams and group-member seeds never collide
_DOC_STREAM = 0
_GROUP_CHILD = 1


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the corpus generator.

    `K` counts all topics including the function topic; `K_m` content topics
    are active per document.  `overlap` scales each content topic's width
    relative to the spacing between adjacent topic centers.
    """

    M: int
    V: int
    N: int
    K: int
    K_m: int
    shape: str = "laplace"
    overlap: float = 0.4
    function_fraction: float = 0.2
    function_block_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "shape", str(self.shape).lower())
        if self.shape not in SHAPES:
            raise ConfigurationError(f"shape must be one of {SHAPES}: got {self.shape!r}")
        if self.M < 0:
            raise ConfigurationError("M must be nonnegative")
        if self.N < 1:
            raise ConfigurationError("N must be at least 1")
        if self.K < 2:
            raise ConfigurationError("K must be at least 2 (content topics plus the function topic)")
        if self.V < max(2, self.K):
            raise ConfigurationError(f"V must be at least max(2, K): V={self.V}, K={self.K}")
        if not (1 <= self.K_m <= self.K - 1):
            raise ConfigurationError(f"K_m must satisfy 1 <= K_m <= K-1: K_m={self.K_m}, K={self.K}")
        if not (0.0 < self.overlap <= 1.0):
            raise ConfigurationError(f"overlap must lie in (0, 1]: got {self.overlap}")
        if not (0.0 <= self.function_fraction < 1.0):
            raise ConfigurationError(
                f"function_fraction must lie in [0, 1): got {self.function_fraction}"
            )
        if not (0.0 < self.function_block_fraction < 1.0):
            raise ConfigurationError(
                f"function_block_fraction must lie in (0, 1): got {self.function_block_fraction}"
            )
        if not (0 <= self.seed <= 2**64 - 1):
            raise ConfigurationError(f"seed must be in [0, 2^64): got {self.seed}")
        if self.function_block_size >= self.V:
            raise ConfigurationError("function block would cover the whole vocabulary")
        if self.function_block_size < 1:
            raise ConfigurationError("function block is empty; increase function_block_fraction")
        if self.content_size < self.K - 1:
            raise ConfigurationError(
                f"content vocabulary ({self.content_size} words) cannot host {self.K - 1} topic centers"
            )

    @property
    def function_block_size(self) -> int:
        return int(round(self.function_block_fraction * self.V))

    @property
    def content_size(self) -> int:
        return self.V - self.function_block_size

    def vocabulary(self) -> Vocabulary:
        return Vocabulary(size=self.V, function_block=(self.content_size, self.V))


def build_ground_truth_topics(config: GeneratorConfig) -> np.ndarray:
    """Construct the K x V row-stochastic ground-truth word-topic matrix.

    The K-1 content topics sit on the circular content vocabulary with
    evenly spaced centers; row K-1 is uniform over the function block.
    """
    v_c = config.content_size
    n_content = config.K - 1
    step = max(1, int(round(v_c / n_content)))
    width = config.overlap * (v_c / n_content)

    phi = np.zeros((config.K, config.V), dtype=np.float64)
    positions = np.arange(v_c)
    for k in range(n_content):
        center = (k * step) % v_c
        straight = np.abs(positions - center)
        d = np.minimum(straight, v_c - straight)
        if config.shape == "laplace":
            w = np.exp(-d / width)
        else:
            w = np.exp(-(d.astype(np.float64) ** 2) / (2.0 * width * width))
        phi[k, :v_c] = w / w.sum()

    phi[config.K - 1, v_c:] = 1.0 / config.function_block_size
    return phi


def sample_document(
    phi: np.ndarray, config: GeneratorConfig, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample one document: choose active topics, mix them, emit N tokens.

    The active set is K_m uniformly chosen content topics plus the function
    topic; proportions are drawn jointly from a Dirichlet whose function-topic
    weight is set so the expected function share equals `function_fraction`.
    A fixed (rather than expected) share would make stop words statistically
    indistinguishable from a flat admixture inside every content topic, and
    no inference algorithm could then isolate the function topic.

    Returns the token array and the full-length K topic-proportion row
    (zeros on inactive topics).
    """
    K = config.K
    ff = config.function_fraction
    active = np.sort(rng.choice(K - 1, size=config.K_m, replace=False))

    theta = np.zeros(K, dtype=np.float64)
    if ff > 0.0:
        concentration = np.ones(config.K_m + 1)
        concentration[-1] = config.K_m * ff / (1.0 - ff)
        props = sample_dirichlet(concentration, rng)
        theta[active] = props[: config.K_m]
        theta[K - 1] = props[config.K_m]
    else:
        theta[active] = sample_dirichlet(np.ones(config.K_m), rng)

    tokens = np.empty(config.N, dtype=np.int64)
    for n in range(config.N):
        topic = sample_categorical(theta, rng)
        tokens[n] = sample_categorical(phi[topic], rng)
    return tokens, theta


def generate_corpus(config: GeneratorConfig) -> tuple[Corpus, GroundTruthModel]:
    """Generate a corpus of M documents from one shared ground-truth model.

    Document m draws from its own child stream of `config.seed`, so corpora
    are reproducible bit-exactly from (config, seed).
    """
    phi = build_ground_truth_topics(config)
    docs: list[np.ndarray] = []
    thetas = np.zeros((config.M, config.K), dtype=np.float64)
    for m in range(config.M):
        rng = make_rng(config.seed, _DOC_STREAM, m)
        tokens, theta = sample_document(phi, config, rng)
        docs.append(tokens)
        thetas[m] = theta

    corpus = Corpus(docs=docs, vocab=config.vocabulary(), seed=config.seed, gen_params=config)
    truth = GroundTruthModel(phi=phi, theta=thetas, K=config.K, includes_function_topic=True)
    return corpus, truth


def group_child_seed(seed: int, index: int) -> int:
    """Seed of the index-th member of a corpus group based at `seed`."""
    return derive_seed(seed, _GROUP_CHILD, index)


def generate_group(
    config: GeneratorConfig, group_size: int
) -> list[tuple[Corpus, GroundTruthModel]]:
    """Generate `group_size` independent corpora sharing `config`.

    Member i runs with the child seed derived from (config.seed, i).
    """
    if group_size < 1:
        raise ParameterError("group_size must be at least 1")
    out = []
    for i in range(group_size):
        child = replace(config, seed=group_child_seed(config.seed, i))
        out.append(generate_corpus(child))
    return out
