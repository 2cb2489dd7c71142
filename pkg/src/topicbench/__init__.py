"""Topic-model evaluation workbench.

Generates bag-of-words corpora from known ground-truth topic distributions,
fits LDA with collapsed Gibbs sampling and variational Bayes, and scores the
extracted topics with aligned forward KL divergence and C_v coherence.
"""

from .core import (
    Assignments,
    ConfigurationError,
    ConsistencyError,
    Corpus,
    DirichletHyperparams,
    FitResult,
    GroundTruthModel,
    ParameterError,
    Vocabulary,
    circular_distance,
    derive_seed,
    make_rng,
    recount,
    sample_categorical,
    sample_dirichlet,
)
from .evaluation import (
    CoherenceConfig,
    DivergenceError,
    EvalReport,
    WindowStats,
    align_topics,
    build_window_stats,
    cv_score,
    kld,
    npmi,
    smooth_distribution,
)
from .gibbs import GibbsConfig, conditional_distribution, gibbs_fit
from .harness import (
    ExperimentSpec,
    GroupSummary,
    boxplot_stats,
    coherence_sweep,
    run_experiment,
    verify_output_tree,
)
from .simgen import (
    GeneratorConfig,
    build_ground_truth_topics,
    generate_corpus,
    generate_group,
    sample_document,
)
from .svgplot import emit_boxplot, emit_wordtopic_plot
from .vb import VariationalState, VbConfig, compute_elbo, vb_fit, vb_fit_with_state

__version__ = "0.1.0"

__all__ = [
    "Assignments",
    "CoherenceConfig",
    "ConfigurationError",
    "ConsistencyError",
    "Corpus",
    "DirichletHyperparams",
    "DivergenceError",
    "EvalReport",
    "ExperimentSpec",
    "FitResult",
    "GeneratorConfig",
    "GibbsConfig",
    "GroundTruthModel",
    "GroupSummary",
    "ParameterError",
    "VariationalState",
    "VbConfig",
    "Vocabulary",
    "WindowStats",
    "align_topics",
    "boxplot_stats",
    "build_ground_truth_topics",
    "build_window_stats",
    "circular_distance",
    "coherence_sweep",
    "compute_elbo",
    "conditional_distribution",
    "cv_score",
    "derive_seed",
    "emit_boxplot",
    "emit_wordtopic_plot",
    "generate_corpus",
    "generate_group",
    "gibbs_fit",
    "kld",
    "make_rng",
    "npmi",
    "recount",
    "run_experiment",
    "sample_categorical",
    "sample_dirichlet",
    "sample_document",
    "smooth_distribution",
    "vb_fit",
    "vb_fit_with_state",
    "verify_output_tree",
]
