"""Baked-in experiment regimes.

`smaller`: V=100, N=100, K=7, K_m=3, Laplace topic shape, alpha=beta=0.5.
`larger`:  V=500, N=120, K=10, K_m=5, Gaussian topic shape, alpha=beta=0.1.
"""

from __future__ import annotations

from dataclasses import replace

from .core import DirichletHyperparams, ParameterError
from .gibbs import GibbsConfig
from .simgen import GeneratorConfig
from .vb import VbConfig

FAST_GIBBS_ITERATIONS = 2500
FAST_GROUP_SIZE = 10

_PRESETS = {
    "smaller": {
        "generator": dict(M=50, V=100, N=100, K=7, K_m=3, shape="laplace"),
        "hyper": DirichletHyperparams(alpha=0.5, beta=0.5),
    },
    "larger": {
        "generator": dict(M=50, V=500, N=120, K=10, K_m=5, shape="gaussian"),
        "hyper": DirichletHyperparams(alpha=0.1, beta=0.1),
    },
}

PRESET_NAMES = tuple(_PRESETS)


def generator_config(preset: str, **overrides) -> GeneratorConfig:
    base = dict(_base(preset)["generator"])
    base.update(overrides)
    return GeneratorConfig(**base)


def hyperparams(preset: str) -> DirichletHyperparams:
    return _base(preset)["hyper"]


def gibbs_config(preset: str, K: int | None = None, fast: bool = False, seed: int = 0, **overrides) -> GibbsConfig:
    base = _base(preset)
    cfg = GibbsConfig(
        K=K if K is not None else base["generator"]["K"],
        hyper=base["hyper"],
        iterations=FAST_GIBBS_ITERATIONS if fast else 5000,
        seed=seed,
    )
    return replace(cfg, **overrides) if overrides else cfg


def vb_config(preset: str, K: int | None = None, seed: int = 0, **overrides) -> VbConfig:
    base = _base(preset)
    cfg = VbConfig(
        K=K if K is not None else base["generator"]["K"],
        hyper=base["hyper"],
        seed=seed,
    )
    return replace(cfg, **overrides) if overrides else cfg


def _base(preset: str) -> dict:
    try:
        return _PRESETS[preset]
    except KeyError:
        raise ParameterError(f"unknown preset {preset!r}; choose from {PRESET_NAMES}") from None
