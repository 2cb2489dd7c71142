"""Experiment driver: corpus-group sweeps, box-plot statistics, coherence
sweeps, and the persistent output tree.

Everything derives from one master seed, so a run can be reproduced and
verified hash-for-hash from its spec echo alone.  Corpus-level jobs are
independent and may execute on a process pool; aggregation is keyed by
corpus index, never by completion order.
"""

from __future__ import annotations

import dataclasses
import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import DirichletHyperparams, ParameterError, derive_seed
from .evaluation import CoherenceConfig, align_topics, build_window_stats, cv_score
from .gibbs import GibbsConfig, gibbs_fit
from .simgen import GeneratorConfig, generate_corpus, group_child_seed
from .storage import hash_tree, read_json, write_corpus, write_eval, write_fit, write_json
from .svgplot import emit_boxplot
from .vb import VbConfig, vb_fit

ALGORITHMS = ("gibbs", "vb")

# spawn-key namespaces for per-job seed derivation from the master seed
_GROUP_SEED = 10
_FIT_SEED = 11
_SWEEP_FIT_SEED = 12

EXPERIMENT_FILE = "experiment.json"
SUMMARY_FILE = "summary.json"
KLD_PLOT_FILE = "boxplot_kld.svg"
COHERENCE_SUMMARY_FILE = "coherence_summary.json"
COHERENCE_PLOT_FILE = "coherence_K.svg"


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: str
    base_config: GeneratorConfig
    gibbs: GibbsConfig
    vb: VbConfig
    m_values: tuple[int, ...] = (50, 100, 200, 300, 400, 500)
    group_size: int = 20
    k_range: tuple[int, ...] = ()
    coherence: CoherenceConfig = field(default_factory=CoherenceConfig)
    master_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not self.m_values:
            raise ParameterError("m_values must be nonempty")
        if self.group_size < 1:
            raise ParameterError("group_size must be at least 1")
        if self.jobs < 1:
            raise ParameterError("jobs must be at least 1")


@dataclass
class GroupSummary:
    """Box-plot statistics of one metric across a group of corpora."""

    M: int
    algorithm: str
    values: list[float]
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: list[float]
    k: int | None = None

    def to_dict(self) -> dict:
        out = {
            "M": self.M,
            "algorithm": self.algorithm,
            "values": self.values,
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "whisker_low": self.whisker_low,
            "whisker_high": self.whisker_high,
            "outliers": self.outliers,
        }
        if self.k is not None:
            out["k"] = self.k
        return out


def boxplot_stats(values) -> dict:
    """Type-7 quartiles with Tukey whiskers at 1.5 IQR clamped to the data."""
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        raise ParameterError("cannot summarize an empty value list")
    q1, med, q3 = (float(np.quantile(vals, q, method="linear")) for q in (0.25, 0.5, 0.75))
    iqr = q3 - q1
    fence_lo, fence_hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inliers = vals[(vals >= fence_lo) & (vals <= fence_hi)]
    outliers = vals[(vals < fence_lo) | (vals > fence_hi)]
    return {
        "median": med,
        "q1": q1,
        "q3": q3,
        "whisker_low": float(inliers.min()),
        "whisker_high": float(inliers.max()),
        "outliers": sorted(float(v) for v in outliers),
    }


def _summary(M: int, algorithm: str, values: list[float], k: int | None = None) -> GroupSummary:
    return GroupSummary(M=M, algorithm=algorithm, values=[float(v) for v in values],
                        k=k, **boxplot_stats(values))


# ---------------------------------------------------------------------------
# per-corpus jobs (module level so they cross process boundaries)

def _corpus_config(spec: ExperimentSpec, group_idx: int, corpus_idx: int, M: int) -> GeneratorConfig:
    group_seed = derive_seed(spec.master_seed, _GROUP_SEED, group_idx)
    return replace(
        spec.base_config, M=M, seed=group_child_seed(group_seed, corpus_idx)
    )


def _kld_job(args) -> tuple[int, int, dict[str, float]]:
    spec, group_idx, corpus_idx, M, out_dir = args
    config = _corpus_config(spec, group_idx, corpus_idx, M)
    corpus, truth = generate_corpus(config)

    corpus_dir = Path(out_dir) / str(M) / str(corpus_idx)
    write_corpus(corpus, truth, corpus_dir)

    result: dict[str, float] = {}
    for algo_idx, algo in enumerate(ALGORITHMS):
        seed = derive_seed(spec.master_seed, _FIT_SEED, group_idx, corpus_idx, algo_idx)
        if algo == "gibbs":
            cfg = replace(spec.gibbs, seed=seed)
            fit = gibbs_fit(corpus, cfg)
        else:
            cfg = replace(spec.vb, seed=seed)
            fit = vb_fit(corpus, cfg)
        write_fit(fit, corpus_dir / f"fit_{algo}.json", config=cfg)
        report = align_topics(truth.phi, fit.phi_hat)
        write_eval(report, corpus_dir / f"eval_{algo}.json")
        result[algo] = report.average_kld
    return group_idx, corpus_idx, result


def _coherence_job(args) -> tuple[int, int, dict[tuple[str, int], float]]:
    spec, group_idx, corpus_idx, M = args
    config = _corpus_config(spec, group_idx, corpus_idx, M)
    corpus, _ = generate_corpus(config)
    stats = build_window_stats(corpus, spec.coherence.window)

    result: dict[tuple[str, int], float] = {}
    for k_idx, k in enumerate(spec.k_range):
        for algo_idx, algo in enumerate(ALGORITHMS):
            seed = derive_seed(
                spec.master_seed, _SWEEP_FIT_SEED, group_idx, corpus_idx, k_idx, algo_idx
            )
            if algo == "gibbs":
                fit = gibbs_fit(corpus, replace(spec.gibbs, K=k, seed=seed))
            else:
                fit = vb_fit(corpus, replace(spec.vb, K=k, seed=seed))
            _, mean = cv_score(fit.phi_hat, corpus, spec.coherence, stats=stats)
            result[(algo, k)] = mean
    return group_idx, corpus_idx, result


def _run_jobs(jobs, worker, n_workers: int):
    if n_workers <= 1 or len(jobs) <= 1:
        return [worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(worker, jobs))


def _spec_echo(spec: ExperimentSpec, mode: str) -> dict:
    return {
        "mode": mode,
        "dataset": spec.dataset,
        "base_config": dataclasses.asdict(spec.base_config),
        "gibbs": dataclasses.asdict(spec.gibbs),
        "vb": dataclasses.asdict(spec.vb),
        "m_values": list(spec.m_values),
        "group_size": spec.group_size,
        "k_range": list(spec.k_range),
        "coherence": dataclasses.asdict(spec.coherence),
        "master_seed": spec.master_seed,
    }


def spec_from_echo(raw: dict, jobs: int = 1) -> tuple[ExperimentSpec, str]:
    """Rebuild an ExperimentSpec from a persisted experiment.json payload."""
    gibbs_raw = dict(raw["gibbs"])
    vb_raw = dict(raw["vb"])
    gibbs_raw["hyper"] = DirichletHyperparams(**gibbs_raw["hyper"])
    vb_raw["hyper"] = DirichletHyperparams(**vb_raw["hyper"])
    spec = ExperimentSpec(
        dataset=raw["dataset"],
        base_config=GeneratorConfig(**raw["base_config"]),
        gibbs=GibbsConfig(**gibbs_raw),
        vb=VbConfig(**vb_raw),
        m_values=tuple(raw["m_values"]),
        group_size=raw["group_size"],
        k_range=tuple(raw["k_range"]),
        coherence=CoherenceConfig(**raw["coherence"]),
        master_seed=raw["master_seed"],
        jobs=jobs,
    )
    return spec, raw["mode"]


# ---------------------------------------------------------------------------
# experiment entry points

def run_experiment(spec: ExperimentSpec, out_dir: Path | str) -> list[GroupSummary]:
    """Generate every group, fit both algorithms, evaluate aligned KLD, and
    persist corpora, fits, evaluations, summaries, and the box plot."""
    out = Path(out_dir) / spec.dataset
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / EXPERIMENT_FILE, _spec_echo(spec, mode="kld"), indent=2)

    jobs = [
        (spec, gi, ci, M, out)
        for gi, M in enumerate(spec.m_values)
        for ci in range(spec.group_size)
    ]
    results = _run_jobs(jobs, _kld_job, spec.jobs)

    by_key: dict[tuple[int, int], dict[str, float]] = {
        (gi, ci): res for gi, ci, res in results
    }
    summaries: list[GroupSummary] = []
    for gi, M in enumerate(spec.m_values):
        for algo in ALGORITHMS:
            values = [by_key[(gi, ci)][algo] for ci in range(spec.group_size)]
            summaries.append(_summary(M, algo, values))

    write_json(out / SUMMARY_FILE, [s.to_dict() for s in summaries], indent=2)
    emit_boxplot(summaries, out / KLD_PLOT_FILE,
                 title=f"average KLD by corpus size ({spec.dataset})")
    return summaries


def coherence_sweep(spec: ExperimentSpec, out_dir: Path | str) -> list[GroupSummary]:
    """Fit both algorithms over the configured K range on every corpus and
    summarize coherence per (K, algorithm)."""
    if not spec.k_range:
        raise ParameterError("coherence sweep requires a nonempty k_range")
    out = Path(out_dir) / spec.dataset
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / EXPERIMENT_FILE, _spec_echo(spec, mode="coherence"), indent=2)

    jobs = [
        (spec, gi, ci, M)
        for gi, M in enumerate(spec.m_values)
        for ci in range(spec.group_size)
    ]
    results = _run_jobs(jobs, _coherence_job, spec.jobs)
    by_key = {(gi, ci): res for gi, ci, res in results}

    summaries: list[GroupSummary] = []
    for gi, M in enumerate(spec.m_values):
        for k in spec.k_range:
            for algo in ALGORITHMS:
                values = [by_key[(gi, ci)][(algo, k)] for ci in range(spec.group_size)]
                summaries.append(_summary(M, algo, values, k=k))

    write_json(out / COHERENCE_SUMMARY_FILE, [s.to_dict() for s in summaries], indent=2)
    emit_boxplot(
        summaries,
        out / COHERENCE_PLOT_FILE,
        title=f"coherence by topic count ({spec.dataset})",
        xlabel="number of topics (K)",
        ylabel="C_v coherence",
        group_key=lambda s: s.k,
    )
    return summaries


def rerun_from_echo(experiment_file: Path | str, out_dir: Path | str, jobs: int = 1) -> None:
    """Re-execute the experiment recorded in an experiment.json echo."""
    spec, mode = spec_from_echo(read_json(experiment_file), jobs=jobs)
    if mode == "coherence":
        coherence_sweep(spec, out_dir)
    else:
        run_experiment(spec, out_dir)


def verify_output_tree(dataset_dir: Path | str, jobs: int = 1) -> list[str]:
    """Recompute a persisted experiment from its spec echo and return the
    relative paths of any files that differ (empty list = verified)."""
    dataset_dir = Path(dataset_dir)
    echo_path = dataset_dir / EXPERIMENT_FILE
    if not echo_path.is_file():
        raise ParameterError(f"{echo_path} not found; nothing to verify")
    want = hash_tree(dataset_dir)

    tmp = Path(tempfile.mkdtemp(prefix="topicbench-verify-"))
    try:
        rerun_from_echo(echo_path, tmp, jobs=jobs)
        got = hash_tree(tmp / read_json(echo_path)["dataset"])
    finally:
        shutil.rmtree(tmp, ignore_errors=True)

    mismatched = sorted(
        set(k for k in want if want.get(k) != got.get(k))
        | set(k for k in got if k not in want)
    )
    return mismatched
