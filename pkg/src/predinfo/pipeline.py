"""Data-driven analysis: center, choose the VAR order, fit, decompose."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InputError
from .gaussian_info import MODEL, SAMPLE, InfoContext, sample_covariance
from .lagged_moments import DEFAULT_Q
from .lattice import PridResult, decompose
from .var_model import TimeSeries, VarModel, estimate_var, select_order

DEFAULT_MAX_ORDER = 10


@dataclass(frozen=True)
class AnalysisSettings:
    """How a series is turned into a decomposition.

    ``order=None`` selects the order by BIC over ``1..max_order``.
    """

    order: Optional[int] = None
    max_order: int = DEFAULT_MAX_ORDER
    q: int = DEFAULT_Q
    sigma_x: str = MODEL

    def __post_init__(self):
        if self.order is not None and self.order < 1:
            raise InputError("fixed order must be >= 1")
        if self.max_order < 1:
            raise InputError("max_order must be >= 1")
        if self.q < 1:
            raise InputError("q must be >= 1")
        if self.sigma_x not in (MODEL, SAMPLE):
            raise InputError(f"sigma_x must be {MODEL!r} or {SAMPLE!r}")
        top = self.order if self.order is not None else self.max_order
        if top > self.q:
            raise InputError(f"q={self.q} must be at least the largest VAR order ({top})")

    def min_length(self, n_vars: int) -> int:
        p = self.order if self.order is not None else self.max_order
        return n_vars * p + 2


@dataclass(frozen=True)
class Analysis:
    model: VarModel
    result: PridResult
    bic: Optional[tuple] = None


def fit_model(series: TimeSeries, settings: AnalysisSettings):
    need = settings.min_length(series.n_vars)
    if series.n_samples < need:
        raise InputError(
            f"series too short: need T >= N*p + 2 = {need} samples, got {series.n_samples}"
        )
    centered = series.center()
    bic = None
    order = settings.order
    if order is None:
        sel = select_order(centered, settings.max_order)
        order, bic = sel.order, tuple(float(v) for v in sel.criteria)
    return estimate_var(centered, order), bic


def analyze_series(series: TimeSeries, settings: AnalysisSettings = AnalysisSettings()) -> Analysis:
    model, bic = fit_model(series, settings)
    sigma_x = sample_covariance(series) if settings.sigma_x == SAMPLE else None
    ctx = InfoContext.from_model(model, q=settings.q, sigma_x=sigma_x)
    return Analysis(model, decompose(ctx), bic)
