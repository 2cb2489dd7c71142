"""Command-line interface: a thin client over the library.

Every subcommand makes the same library calls the service and tests make, so
identical configs produce identical artifacts regardless of entry point.
Diagnostics go to stderr; data goes to files or stdout, never mixed.
"""

from __future__ import annotations

import dataclasses
import functools
import json
import os
from dataclasses import replace
from pathlib import Path

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

import click
import numpy as np

from . import evaluation, harness, presets, storage
from .core import DirichletHyperparams, ParameterError
from .gibbs import GibbsConfig, gibbs_fit
from .simgen import GeneratorConfig, generate_corpus
from .svgplot import emit_wordtopic_plot
from .vb import VbConfig, vb_fit

_GENERATOR_FIELDS = {f.name for f in dataclasses.fields(GeneratorConfig)}


def _fail(message: str) -> "click.exceptions.Exit":
    click.echo(f"error: {message}", err=True)
    return click.exceptions.Exit(1)


def _runtime_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ParameterError, OSError, json.JSONDecodeError) as err:
            raise _fail(str(err))

    return wrapper


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if p.suffix.lower() == ".toml":
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    return json.loads(p.read_text(encoding="utf-8"))


def _generator_from_options(preset, file_values: dict, **flags) -> GeneratorConfig:
    values: dict = {}
    if preset:
        values.update(
            dataclasses.asdict(presets.generator_config(preset))
        )
    values.update({k: v for k, v in file_values.items() if k in _GENERATOR_FIELDS})
    values.update({k: v for k, v in flags.items() if v is not None})
    missing = _GENERATOR_FIELDS - set(values) - {
        "shape", "overlap", "function_fraction", "function_block_fraction", "seed"
    }
    if missing:
        raise click.UsageError(
            f"missing generator parameters {sorted(missing)}; pass --preset or explicit flags"
        )
    return GeneratorConfig(**values)


@click.group()
@click.version_option(package_name="topicbench")
def main():
    """Synthetic-corpus workbench for evaluating LDA inference."""


# ---------------------------------------------------------------------------
# generate

@main.command()
@click.option("--preset", type=click.Choice(presets.PRESET_NAMES), default=None)
@click.option("--config", "config_file", type=click.Path(exists=True), default=None,
              help="TOML or JSON file of generator parameters; flags override it.")
@click.option("-M", "--docs", "M", type=int, default=None, help="documents per corpus")
@click.option("-V", "--vocab", "V", type=int, default=None)
@click.option("-N", "--doc-length", "N", type=int, default=None)
@click.option("-K", "--topics", "K", type=int, default=None)
@click.option("--topics-per-doc", "K_m", type=int, default=None)
@click.option("--shape", type=click.Choice(("laplace", "gaussian")), default=None)
@click.option("--overlap", type=float, default=None)
@click.option("--function-fraction", type=float, default=None)
@click.option("--function-block-fraction", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("-o", "--out", type=click.Path(), required=True)
@_runtime_errors
def generate(preset, config_file, out, **flags):
    """Generate one corpus and write its three-file set to OUT."""
    config = _generator_from_options(preset, _load_config_file(config_file), **flags)
    corpus, truth = generate_corpus(config)
    storage.write_corpus(corpus, truth, out)
    click.echo(f"wrote {corpus.M} documents to {out}", err=True)


# ---------------------------------------------------------------------------
# fit

@main.command()
@click.option("--algo", type=click.Choice(harness.ALGORITHMS), required=True)
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_file", type=click.Path(exists=True), default=None)
@click.option("-K", "--topics", "K", type=int, default=None,
              help="topic count; defaults to the corpus ground-truth K")
@click.option("--iters", type=int, default=None, help="Gibbs sweeps (default 5000)")
@click.option("--burn-in-fraction", type=float, default=None)
@click.option("--thin", type=int, default=None)
@click.option("--epochs", type=int, default=None, help="VB epochs (default 150)")
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--seed", type=int, default=0)
@click.option("-o", "--out", type=click.Path(), default=None,
              help="output file (default: fit_<algo>.json inside the corpus directory)")
@_runtime_errors
def fit(algo, corpus_dir, config_file, K, iters, burn_in_fraction, thin, epochs, alpha, beta, seed, out):
    """Fit LDA to a stored corpus and write the estimate."""
    corpus, truth = storage.read_corpus(corpus_dir)
    file_values = _load_config_file(config_file)
    k = K or file_values.get("K") or truth.K

    hyper_defaults = presets.hyperparams("smaller")
    hyper = DirichletHyperparams(
        alpha=alpha if alpha is not None else file_values.get("alpha", hyper_defaults.alpha),
        beta=beta if beta is not None else file_values.get("beta", hyper_defaults.beta),
    )
    if algo == "gibbs":
        cfg = GibbsConfig(
            K=k,
            hyper=hyper,
            iterations=iters if iters is not None else file_values.get("iters", 5000),
            burn_in_fraction=burn_in_fraction if burn_in_fraction is not None else 0.8,
            thin=thin if thin is not None else 10,
            seed=seed,
        )
        result = gibbs_fit(corpus, cfg)
    else:
        cfg = VbConfig(
            K=k,
            hyper=hyper,
            epochs=epochs if epochs is not None else file_values.get("epochs", 150),
            seed=seed,
        )
        result = vb_fit(corpus, cfg)

    path = Path(out) if out else Path(corpus_dir) / storage.fit_filename(algo)
    storage.write_fit(result, path, config=cfg)
    click.echo(
        f"{algo} fit: {result.iterations} iterations in {result.wall_seconds:.2f}s -> {path}",
        err=True,
    )


# ---------------------------------------------------------------------------
# eval

@main.command("eval")
@click.option("--fit", "fit_path", type=click.Path(exists=True), required=True)
@click.option("--truth", "truth_path", type=click.Path(exists=True), required=True,
              help="ground_truth.json or the corpus directory containing it")
@click.option("-o", "--out", type=click.Path(), default=None,
              help="evaluation report path (default: eval.json next to the fit)")
@click.option("--plot", type=click.Path(), default=None,
              help="also write a word-topic overlay SVG here")
@_runtime_errors
def eval_cmd(fit_path, truth_path, out, plot):
    """Score a stored fit against stored ground truth; print the average KLD."""
    truth_file = Path(truth_path)
    if truth_file.is_dir():
        truth_file = truth_file / storage.GROUND_TRUTH_FILE
    raw = storage.read_json(truth_file)
    truth_phi = np.asarray(raw["phi"], dtype=np.float64)

    fit = storage.read_fit(fit_path)
    report = evaluation.align_topics(truth_phi, fit.phi_hat)

    path = Path(out) if out else Path(fit_path).parent / "eval.json"
    storage.write_eval(report, path)
    if plot:
        emit_wordtopic_plot(truth_phi, fit.phi_hat, report.alignment, report.average_kld, plot)
    click.echo(f"{report.average_kld:.6f}")


# ---------------------------------------------------------------------------
# experiment / coherence

def _spec_options(fn):
    options = [
        click.option("--preset", type=click.Choice(presets.PRESET_NAMES), default="smaller"),
        click.option("--config", "config_file", type=click.Path(exists=True), default=None),
        click.option("--m-values", default=None,
                     help="comma-separated documents-per-corpus list, e.g. 50,100,200"),
        click.option("--group-size", type=int, default=None),
        click.option("--gibbs-iters", type=int, default=None),
        click.option("--vb-epochs", type=int, default=None),
        click.option("--seed", type=int, default=0, help="master seed"),
        click.option("--fast", is_flag=True,
                     help="desk-scale profile: 2500 Gibbs sweeps, groups of 10"),
        click.option("--jobs", type=int, default=None,
                     help="worker processes (default: number of processors)"),
        click.option("-o", "--out", type=click.Path(), required=True),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _build_spec(preset, config_file, m_values, group_size, gibbs_iters, vb_epochs,
                seed, fast, jobs, k_range=()) -> harness.ExperimentSpec:
    file_values = _load_config_file(config_file)
    if m_values is None:
        m_values = file_values.get("m_values")
    if isinstance(m_values, str):
        m_values = tuple(int(x) for x in m_values.split(",") if x.strip())
    if group_size is None:
        group_size = file_values.get(
            "group_size", presets.FAST_GROUP_SIZE if fast else 20
        )
    gibbs_cfg = presets.gibbs_config(preset, fast=fast)
    if gibbs_iters is not None:
        gibbs_cfg = replace(gibbs_cfg, iterations=gibbs_iters)
    vb_cfg = presets.vb_config(preset)
    if vb_epochs is not None:
        vb_cfg = replace(vb_cfg, epochs=vb_epochs)
    return harness.ExperimentSpec(
        dataset=preset,
        base_config=presets.generator_config(preset),
        gibbs=gibbs_cfg,
        vb=vb_cfg,
        m_values=tuple(m_values) if m_values else (50, 100, 200, 300, 400, 500),
        group_size=group_size,
        k_range=tuple(k_range),
        master_seed=seed,
        jobs=jobs if jobs is not None else (os.cpu_count() or 1),
    )


def _export_summaries(summaries, out_dir: Path, fmt: str, filename: str):
    if fmt == "csv":
        lines = ["M,k,algorithm,median,q1,q3,whisker_low,whisker_high,n_values,n_outliers"]
        for s in summaries:
            lines.append(
                f"{s.M},{s.k if s.k is not None else ''},{s.algorithm},"
                f"{s.median:.6f},{s.q1:.6f},{s.q3:.6f},{s.whisker_low:.6f},"
                f"{s.whisker_high:.6f},{len(s.values)},{len(s.outliers)}"
            )
        (out_dir / filename).write_text("\n".join(lines) + "\n", encoding="utf-8")


@main.command()
@_spec_options
@click.option("--format", "fmt", type=click.Choice(("json", "csv")), default="json",
              help="additionally export summaries as CSV")
@_runtime_errors
def experiment(preset, config_file, m_values, group_size, gibbs_iters, vb_epochs,
               seed, fast, jobs, out, fmt):
    """Run the corpus-group KLD comparison and write the output tree."""
    spec = _build_spec(preset, config_file, m_values, group_size, gibbs_iters,
                       vb_epochs, seed, fast, jobs)
    summaries = harness.run_experiment(spec, out)
    if fmt == "csv":
        _export_summaries(summaries, Path(out) / spec.dataset, fmt, "summary.csv")
    for s in summaries:
        click.echo(f"M={s.M} {s.algorithm}: median KLD {s.median:.4f}", err=True)
    click.echo(f"outputs in {Path(out) / spec.dataset}", err=True)


@main.command()
@_spec_options
@click.option("--k-min", type=int, required=True)
@click.option("--k-max", type=int, required=True)
@click.option("-M", "--docs", "M", type=int, default=100,
              help="documents per corpus for the sweep group")
@click.option("--format", "fmt", type=click.Choice(("json", "csv")), default="json")
@_runtime_errors
def coherence(preset, config_file, m_values, group_size, gibbs_iters, vb_epochs,
              seed, fast, jobs, out, k_min, k_max, M, fmt):
    """Sweep the fitted topic count and summarize C_v coherence per K."""
    if k_max < k_min:
        raise click.UsageError("--k-max must be >= --k-min")
    spec = _build_spec(preset, config_file, m_values or str(M), group_size, gibbs_iters,
                       vb_epochs, seed, fast, jobs, k_range=range(k_min, k_max + 1))
    summaries = harness.coherence_sweep(spec, out)
    if fmt == "csv":
        _export_summaries(summaries, Path(out) / spec.dataset, fmt, "coherence_summary.csv")
    for s in summaries:
        click.echo(f"K={s.k} {s.algorithm}: median C_v {s.median:.4f}", err=True)
    click.echo(f"outputs in {Path(out) / spec.dataset}", err=True)


# ---------------------------------------------------------------------------
# serve / verify

@main.command()
@click.option("--listen", default="127.0.0.1:8080", show_default=True,
              help="address:port to bind")
@_runtime_errors
def serve(listen):
    """Run the HTTP corpus-generation API."""
    import uvicorn

    from .service import app

    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise click.UsageError(f"--listen expects addr:port, got {listen!r}")
    uvicorn.run(app, host=host, port=int(port), log_level="info")


@main.command()
@click.option("--out", "dataset_dir", type=click.Path(exists=True), required=True,
              help="dataset directory containing experiment.json")
@click.option("--jobs", type=int, default=None)
@_runtime_errors
def verify(dataset_dir, jobs):
    """Recompute a persisted experiment from its seed and compare hashes."""
    mismatched = harness.verify_output_tree(
        dataset_dir, jobs=jobs if jobs is not None else (os.cpu_count() or 1)
    )
    if mismatched:
        for path in mismatched:
            click.echo(f"mismatch: {path}", err=True)
        raise _fail(f"{len(mismatched)} file(s) failed verification")
    click.echo("verified: all artifacts reproduce from the recorded seed", err=True)


if __name__ == "__main__":
    main()
