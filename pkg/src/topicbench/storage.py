"""Deterministic on-disk formats for corpora, fits, evaluations, and summaries.

Every writer is byte-stable: floats are rendered with 17 significant digits,
dict key order is fixed by the writers, and gzip members carry a zeroed
mtime.  Identical inputs therefore always produce identical files, which is
what makes output trees hashable and verifiable.
"""

from __future__ import annotations

import dataclasses
import gzip
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .core import Corpus, DirichletHyperparams, FitResult, GroundTruthModel, ParameterError
from .simgen import GeneratorConfig

DOCS_FILE = "docs.txt.gz"
DICTIONARY_FILE = "dictionary.json"
GROUND_TRUTH_FILE = "ground_truth.json"


# ---------------------------------------------------------------------------
# deterministic JSON

def dumps_json(obj, indent: int = 0) -> str:
    """Serialize nested dict/list/scalar data with stable float formatting."""
    parts: list[str] = []
    _emit(obj, parts, indent, 0)
    parts.append("\n")
    return "".join(parts)


def _emit(obj, parts: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1)) if indent else ""
    end_pad = " " * (indent * level) if indent else ""
    sep = ",\n" if indent else ","
    nl = "\n" if indent else ""
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ParameterError(f"cannot serialize non-finite float {x!r}")
        parts.append(f"{x:.17g}")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), parts, indent, level)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            parts.append("[]")
            return
        parts.append("[" + nl)
        for i, item in enumerate(obj):
            parts.append(pad)
            _emit(item, parts, indent, level + 1)
            parts.append(sep if i + 1 < len(obj) else nl)
        parts.append(end_pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{" + nl)
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            if not isinstance(k, str):
                k = str(k)
            parts.append(pad + json.dumps(k) + (": " if indent else ":"))
            _emit(v, parts, indent, level + 1)
            parts.append(sep if i + 1 < len(items) else nl)
        parts.append(end_pad + "}")
    else:
        raise ParameterError(f"cannot serialize object of type {type(obj).__name__}")


def write_json(path: Path | str, obj, indent: int = 0) -> None:
    Path(path).write_text(dumps_json(obj, indent=indent), encoding="utf-8")


def read_json(path: Path | str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# corpus file set

def default_dictionary(V: int) -> dict[str, str]:
    """Identity word strings for synthetic data: index i maps to "w{i}"."""
    return {str(i): f"w{i}" for i in range(V)}


def write_corpus(corpus: Corpus, truth: GroundTruthModel, out_dir: Path | str) -> None:
    """Write the three-file corpus set: documents, dictionary, ground truth."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / DOCS_FILE, "wb") as fh:
        # mtime=0 keeps the gzip member byte-identical across runs
        with gzip.GzipFile(filename="", mode="wb", fileobj=fh, mtime=0) as gz:
            for doc in corpus.docs:
                gz.write((" ".join(str(int(t)) for t in doc) + "\n").encode("ascii"))

    write_json(out / DICTIONARY_FILE, default_dictionary(corpus.V))

    cfg = dataclasses.asdict(corpus.gen_params) if corpus.gen_params is not None else None
    write_json(
        out / GROUND_TRUTH_FILE,
        {
            "phi": truth.phi,
            "theta": truth.theta,
            "K": truth.K,
            "includes_function_topic": truth.includes_function_topic,
            "config": cfg,
            "seed": corpus.seed,
        },
    )


def read_corpus(in_dir: Path | str) -> tuple[Corpus, GroundTruthModel]:
    """Read a corpus file set written by `write_corpus`."""
    src = Path(in_dir)
    raw = read_json(src / GROUND_TRUTH_FILE)
    config = GeneratorConfig(**raw["config"]) if raw.get("config") else None
    if config is None:
        raise ParameterError(f"{src / GROUND_TRUTH_FILE} carries no generator config")

    docs: list[np.ndarray] = []
    with gzip.open(src / DOCS_FILE, "rt", encoding="ascii") as gz:
        for line in gz:
            line = line.strip()
            toks = np.array([int(t) for t in line.split()] if line else [], dtype=np.int64)
            docs.append(toks)

    corpus = Corpus(docs=docs, vocab=config.vocabulary(), seed=raw["seed"], gen_params=config)
    corpus.validate()
    truth = GroundTruthModel(
        phi=np.asarray(raw["phi"], dtype=np.float64),
        theta=np.asarray(raw["theta"], dtype=np.float64).reshape(len(docs), raw["K"]),
        K=raw["K"],
        includes_function_topic=raw["includes_function_topic"],
    )
    return corpus, truth


# ---------------------------------------------------------------------------
# fit / evaluation / coherence reports

def fit_filename(algorithm: str) -> str:
    return f"fit_{algorithm}.json"


def write_fit(fit: FitResult, path: Path | str, config=None) -> None:
    """Persist a fit.  Wall-clock time is deliberately not written: output
    trees must be byte-identical across reruns of the same seed."""
    payload = {
        "algorithm": fit.algorithm,
        "iterations": fit.iterations,
        "seed": fit.seed,
        "config": dataclasses.asdict(config) if config is not None else None,
        "phi_hat": fit.phi_hat,
        "theta_hat": fit.theta_hat,
    }
    write_json(path, payload)


def read_fit(path: Path | str) -> FitResult:
    raw = read_json(path)
    return FitResult(
        phi_hat=np.asarray(raw["phi_hat"], dtype=np.float64),
        theta_hat=np.asarray(raw["theta_hat"], dtype=np.float64),
        algorithm=raw["algorithm"],
        iterations=raw["iterations"],
        wall_seconds=0.0,
        seed=raw["seed"],
    )


def write_eval(report, path: Path | str) -> None:
    write_json(
        path,
        {
            "alignment": {str(k): v for k, v in sorted(report.alignment.items())},
            "per_topic_kld": report.per_topic_kld,
            "average_kld": report.average_kld,
        },
    )


def write_coherence(per_topic, mean: float, config, path: Path | str) -> None:
    write_json(
        path,
        {
            "per_topic": per_topic,
            "mean": mean,
            "config": dataclasses.asdict(config),
        },
    )


# ---------------------------------------------------------------------------
# hashing

def hash_tree(root: Path | str) -> dict[str, str]:
    """SHA-256 of every file under `root`, keyed by POSIX relative path."""
    root = Path(root)
    out: dict[str, str] = {}
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        out[path.relative_to(root).as_posix()] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out


def hyper_from_dict(raw: dict) -> DirichletHyperparams:
    return DirichletHyperparams(alpha=raw["alpha"], beta=raw["beta"])
