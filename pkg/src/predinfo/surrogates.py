"""Shuffled-sample surrogates and percentile significance tests.

A surrogate applies one random permutation of time indices to all columns,
which destroys temporal structure but keeps the zero-lag covariance.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, PredInfoError
from .lattice import PridResult
from .pipeline import AnalysisSettings, analyze_series
from .var_model import TimeSeries

UPPER = "upper"
TWO_SIDED = "two-sided"
SIGNED_MEASURES = ("delta_wms", "delta_pid")


@dataclass(frozen=True)
class SurrogateConfig:
    n_surrogates: int = 100
    alpha: float = 0.05
    seed: int = 0
    shared_permutation: bool = True

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InputError("alpha must be in (0, 1)")
        if self.n_surrogates < 20:
            raise InputError("need at least 20 surrogates")


def make_surrogate(series: TimeSeries, rng: np.random.Generator, shared: bool = True) -> TimeSeries:
    if series.n_samples < 2:
        raise InputError("need at least 2 samples to shuffle")
    x = series.data
    if shared:
        return TimeSeries(x[rng.permutation(x.shape[0])], series.labels)
    cols = [x[rng.permutation(x.shape[0]), j] for j in range(x.shape[1])]
    return TimeSeries(np.column_stack(cols), series.labels)


def nearest_rank(sorted_values: np.ndarray, pct: float) -> float:
    """Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value."""
    n = len(sorted_values)
    rank = min(max(math.ceil(pct / 100.0 * n - 1e-9), 1), n)
    return float(sorted_values[rank - 1])


def result_measures(res: PridResult) -> dict:
    out = {"pi": res.pi}
    for i, v in enumerate(res.mi_single):
        out[f"mi_{i + 1}"] = v
    for i, v in enumerate(res.unique):
        out[f"unique_{i + 1}"] = v
    out.update(
        redundancy=res.redundancy,
        synergy=res.synergy,
        delta_wms=res.delta_wms,
        delta_pid=res.delta_pid,
    )
    return {k: float(v) for k, v in out.items()}


@dataclass(frozen=True)
class MeasureTest:
    original: float
    surrogates: np.ndarray = field(repr=False)
    percentile_rank: float
    thresholds: tuple
    significant: bool
    tail: str

    def to_dict(self, include_values: bool = False, scale: float = 1.0) -> dict:
        d = {
            "original": self.original * scale,
            "percentile": self.percentile_rank,
            "thresholds": [t * scale for t in self.thresholds],
            "significant": self.significant,
            "tail": self.tail,
        }
        if include_values:
            d["surrogates"] = (self.surrogates * scale).tolist()
        return d


def percentile_test(original: float, surrogates, alpha: float, tail: str) -> MeasureTest:
    s = np.sort(np.asarray(surrogates, dtype=float))
    rank = 100.0 * np.count_nonzero(s < original) / len(s)
    if tail == UPPER:
        hi = nearest_rank(s, 100 * (1 - alpha))
        return MeasureTest(original, s, rank, (hi,), bool(original > hi), tail)
    if tail == TWO_SIDED:
        lo = nearest_rank(s, 100 * alpha / 2)
        hi = nearest_rank(s, 100 * (1 - alpha / 2))
        return MeasureTest(original, s, rank, (lo, hi), bool(original < lo or original > hi), tail)
    raise InputError(f"unknown tail {tail!r}")


@dataclass(frozen=True)
class SignificanceReport:
    original: PridResult
    tests: dict
    config: SurrogateConfig

    def __getitem__(self, measure: str) -> MeasureTest:
        return self.tests[measure]

    def to_dict(self, include_values: bool = False, scale: float = 1.0) -> dict:
        return {
            "n_surrogates": self.config.n_surrogates,
            "alpha": self.config.alpha,
            "seed": self.config.seed,
            "shared_permutation": self.config.shared_permutation,
            "measures": {k: t.to_dict(include_values, scale) for k, t in self.tests.items()},
        }


def _one_surrogate(series, settings, cfg, child: np.random.SeedSequence) -> dict:
    rng = np.random.Generator(np.random.PCG64(child))
    try:
        return result_measures(analyze_series(make_surrogate(series, rng, cfg.shared_permutation), settings).result)
    except PredInfoError:
        retry = np.random.Generator(np.random.PCG64(child.spawn(1)[0]))
        return result_measures(analyze_series(make_surrogate(series, retry, cfg.shared_permutation), settings).result)


def significance_test(
    series: TimeSeries,
    cfg: SurrogateConfig = SurrogateConfig(),
    settings: AnalysisSettings = AnalysisSettings(),
    n_jobs: int = 1,
    original: PridResult | None = None,
) -> SignificanceReport:
    """Compare every measure with its distribution over shuffled surrogates.

    Each surrogate is fit from scratch, including order selection when
    ``settings.order`` is None. Non-negative measures use the upper
    ``1 - alpha`` percentile; the two balances use the ``alpha/2`` and
    ``1 - alpha/2`` percentiles.
    """
    if original is None:
        original = analyze_series(series, settings).result
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_surrogates)
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            runs = list(pool.map(lambda c: _one_surrogate(series, settings, cfg, c), children))
    else:
        runs = [_one_surrogate(series, settings, cfg, c) for c in children]
    tests = {}
    for name, value in result_measures(original).items():
        tail = TWO_SIDED if name in SIGNED_MEASURES else UPPER
        tests[name] = percentile_test(value, [r[name] for r in runs], cfg.alpha, tail)
    return SignificanceReport(original, tests, cfg)
