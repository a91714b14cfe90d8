"""Gaussian information measures of a VAR process, in nats.

Predictive information ``I(X_n; X_{<n}) = 1/2 ln(|Sigma_X| / |Sigma_U|)`` and
subset information ``I(X_n; X^M_{<n}) = 1/2 ln(|Sigma_X| / |Sigma_W^M|)``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import ConsistencyError, InputError, NotPositiveDefiniteError
from .lagged_moments import (
    DEFAULT_Q,
    LagCovarianceSet,
    _normalize_subset,
    lag_covariances,
    restricted_model,
)
from .var_model import TimeSeries, VarModel

NEGATIVE_TOL = 1e-9
MODEL = "model"
SAMPLE = "sample"


def logdet_spd(m: np.ndarray) -> float:
    """``ln det`` of a symmetric positive definite matrix via Cholesky."""
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("matrix is not positive definite") from None
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


@dataclass(frozen=True)
class InfoContext:
    """Everything needed to evaluate information terms for one model.

    The same ``sigma_x`` is used in the numerator of every term. In
    ``"model"`` mode it is the model-implied ``Gamma_0``; in ``"sample"`` mode
    it is a supplied estimate, and slightly negative terms are clamped to zero
    with a warning instead of raising.
    """

    model: VarModel
    cov: LagCovarianceSet
    q: int
    sigma_x: np.ndarray
    sigma_x_source: str = MODEL
    warnings: list = field(default_factory=list, compare=False, repr=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    @classmethod
    def from_model(
        cls, model: VarModel, q: int = DEFAULT_Q, sigma_x: Optional[np.ndarray] = None
    ) -> "InfoContext":
        if q < max(1, model.order):
            raise InputError(
                f"restricted order q={q} must be >= the model order {model.order}"
            )
        cov = lag_covariances(model, q)
        if sigma_x is None:
            return cls(model, cov, q, cov.sigma_x, MODEL)
        sx = np.asarray(sigma_x, dtype=float)
        if sx.shape != (model.n_vars, model.n_vars):
            raise InputError(f"sigma_x must be {model.n_vars}x{model.n_vars}")
        return cls(model, cov, q, 0.5 * (sx + sx.T), SAMPLE)

    @property
    def n_vars(self) -> int:
        return self.model.n_vars

    def _clamp(self, value: float, what: str) -> float:
        if value >= 0:
            return value
        if value >= -NEGATIVE_TOL:
            return 0.0
        if self.sigma_x_source == SAMPLE:
            msg = f"{what} = {value:.3e} nats clamped to 0 (sample sigma_x)"
            with self._lock:
                if msg not in self.warnings:
                    self.warnings.append(msg)
            return 0.0
        raise ConsistencyError(f"{what} is negative ({value:.3e} nats)")


def sample_covariance(series: TimeSeries) -> np.ndarray:
    """Zero-lag covariance of the centered series, divisor T.

    Sums are correctly rounded (``math.fsum``), so the result does not depend
    on row order and is bit-identical for any time permutation of the data.
    """
    data = series.data
    t, n = data.shape
    mean = np.array([math.fsum(data[:, j]) for j in range(n)]) / t
    x = data - mean
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            cov[i, j] = cov[j, i] = math.fsum(x[:, i] * x[:, j]) / t
    return cov


def predictive_information(ctx: InfoContext) -> float:
    """Mutual information between the present state and the whole past."""
    value = 0.5 * (logdet_spd(ctx.sigma_x) - logdet_spd(ctx.model.innov_cov))
    return ctx._clamp(value, "predictive information")


def subset_mutual_information(ctx: InfoContext, subset: Iterable[int]) -> float:
    """Mutual information between the present state and the past of ``subset`` (0-based).

    Values are cached on the context by subset.
    """
    key = _normalize_subset(subset, ctx.n_vars)
    hit = ctx._cache.get(key)
    if hit is not None:
        return hit
    rm = restricted_model(ctx.cov, key, ctx.q)
    if rm.regularized:
        with ctx._lock:
            ctx.warnings.append(f"restricted model for subset {list(key)} was ridge-regularized")
    value = 0.5 * (logdet_spd(ctx.sigma_x) - logdet_spd(rm.resid_cov))
    value = ctx._clamp(value, f"I(X_n; past of {list(key)})")
    with ctx._lock:
        ctx._cache[key] = value
    return value


def q_sensitivity(ctx: InfoContext, subset: Iterable[int], step: int = 5) -> float:
    """Change in subset information when ``q`` grows by ``step`` lags."""
    wider = InfoContext(
        ctx.model,
        lag_covariances(ctx.model, ctx.q + step),
        ctx.q + step,
        ctx.sigma_x,
        ctx.sigma_x_source,
    )
    return subset_mutual_information(wider, subset) - subset_mutual_information(ctx, subset)


def to_bits(nats: float) -> float:
    return nats / math.log(2.0)
