"""Stationary VAR(p) processes: representation, simulation, OLS fitting, BIC.

A VAR(p) process is ``X_n = sum_{k=1..p} A_k X_{n-k} + U_n`` with white
Gaussian innovations ``U_n ~ N(0, innov_cov)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import (
    InputError,
    NonStationaryError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)

STABILITY_MARGIN = 1e-6
DEFAULT_BURN_IN = 1000
# reciprocal condition number below which the OLS Gram matrix is singular
GRAM_RCOND = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def is_positive_definite(m: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return False
    return True


@dataclass(frozen=True)
class VarModel:
    """Full VAR(p) parameterization.

    Parameters
    ----------
    coeffs : array_like, shape (p, N, N)
        Lag coefficient matrices ``A_1 .. A_p``; ``coeffs[k - 1][i, j]`` is the
        effect of unit ``j`` at lag ``k`` on unit ``i``.
    innov_cov : array_like, shape (N, N)
        Innovation covariance, symmetric positive definite.
    mean : array_like, shape (N,), optional
        Column means removed before fitting, when the model was estimated.

    Stationarity is not enforced here so that unstable parameter sets can be
    inspected with :func:`check_stability`; operations that need it check it.
    """

    coeffs: np.ndarray
    innov_cov: np.ndarray
    mean: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        cov = np.atleast_2d(np.asarray(self.innov_cov, dtype=float))
        n = cov.shape[0]
        if cov.shape != (n, n) or n < 1:
            raise InputError(f"innov_cov must be square, got shape {cov.shape}")
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.size == 0:
            coeffs = np.zeros((0, n, n))
        if coeffs.ndim == 2 and n == coeffs.shape[0] == coeffs.shape[1]:
            coeffs = coeffs[None]
        if coeffs.ndim != 3 or coeffs.shape[1:] != (n, n):
            raise InputError(
                f"coeffs must have shape (p, {n}, {n}), got {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)) or not np.all(np.isfinite(cov)):
            raise InputError("model parameters must be finite")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-10 * max(1.0, np.abs(cov).max())):
            raise NotPositiveDefiniteError("innov_cov is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if not is_positive_definite(cov):
            raise NotPositiveDefiniteError("innov_cov is not positive definite")
        object.__setattr__(self, "coeffs", _frozen(coeffs))
        object.__setattr__(self, "innov_cov", _frozen(cov))
        if self.mean is not None:
            object.__setattr__(self, "mean", _frozen(self.mean))

    @property
    def n_vars(self) -> int:
        return self.innov_cov.shape[0]

    @property
    def order(self) -> int:
        return self.coeffs.shape[0]

    def companion(self) -> np.ndarray:
        return companion_matrix(self.coeffs)

    def padded(self, order: int) -> "VarModel":
        """Same process written with ``order`` lags (trailing zero matrices)."""
        if order < self.order:
            raise InputError(f"cannot pad order {self.order} model down to {order}")
        extra = np.zeros((order - self.order, self.n_vars, self.n_vars))
        return VarModel(np.concatenate([self.coeffs, extra]), self.innov_cov, self.mean)

    def to_dict(self) -> dict:
        return {
            "n_vars": self.n_vars,
            "order": self.order,
            "coeffs": [a.tolist() for a in self.coeffs],
            "innov_cov": self.innov_cov.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VarModel":
        try:
            n, p = int(d["n_vars"]), int(d["order"])
            coeffs = np.asarray(d["coeffs"], dtype=float).reshape(p, n, n) if p else np.zeros((0, n, n))
            cov = np.asarray(d["innov_cov"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid VarModel JSON: {exc}") from exc
        if cov.shape != (n, n):
            raise InputError(f"innov_cov must be {n}x{n}, got {cov.shape}")
        return cls(coeffs, cov)


def companion_matrix(coeffs: np.ndarray) -> np.ndarray:
    """Np x Np companion matrix of ``[A_1 .. A_p]``."""
    p, n, _ = coeffs.shape
    if p == 0:
        return np.zeros((0, 0))
    comp = np.zeros((n * p, n * p))
    comp[:n] = np.concatenate(list(coeffs), axis=1)
    comp[n:, :-n] = np.eye(n * (p - 1))
    return comp


class Stability(NamedTuple):
    radius: float
    stable: bool


def check_stability(model: VarModel) -> Stability:
    """Spectral radius of the companion matrix; stable iff below ``1 - 1e-6``."""
    if model.order == 0:
        return Stability(0.0, True)
    radius = float(np.max(np.abs(np.linalg.eigvals(model.companion()))))
    return Stability(radius, radius < 1.0 - STABILITY_MARGIN)


def require_stationary(model: VarModel) -> None:
    radius, stable = check_stability(model)
    if not stable:
        raise NonStationaryError(radius)


@dataclass(frozen=True)
class TimeSeries:
    """T x N data matrix, rows are samples and columns are units."""

    data: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InputError(f"time series must be a non-empty T x N matrix, got {data.shape}")
        bad = np.argwhere(~np.isfinite(data))
        if bad.size:
            r, c = bad[0]
            raise InputError(f"non-finite value at row {r}, column {c}")
        object.__setattr__(self, "data", _frozen(data))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != data.shape[1]:
                raise InputError(f"{len(labels)} labels for {data.shape[1]} columns")
            object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_vars(self) -> int:
        return self.data.shape[1]

    def center(self) -> "TimeSeries":
        return TimeSeries(self.data - self.data.mean(axis=0), self.labels)


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator; normals come from numpy's ziggurat ``standard_normal``."""
    return np.random.Generator(np.random.PCG64(seed))


def simulate_var(
    model: VarModel,
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    seed=0,
) -> TimeSeries:
    """Generate ``n_samples`` rows of the VAR recursion from a zero initial state.

    Innovations are ``z @ L.T`` with ``z`` standard normal draws and ``L`` the
    lower Cholesky factor of ``innov_cov``; the first ``burn_in`` rows are
    discarded.
    """
    if n_samples < 1:
        raise InputError("n_samples must be >= 1")
    if burn_in < 0:
        raise InputError("burn_in must be >= 0")
    require_stationary(model)
    rng = make_rng(seed)
    z = rng.standard_normal((burn_in + n_samples, model.n_vars))
    noise = z @ np.linalg.cholesky(model.innov_cov).T
    x = _kernels.var_recursion(np.ascontiguousarray(model.coeffs), noise)
    return TimeSeries(x[burn_in:])


def lag_design(x: np.ndarray, order: int, start: Optional[int] = None):
    """Targets and lag-stacked regressors ``[x_{n-1}, ..., x_{n-order}]`` for rows n >= start."""
    t = x.shape[0]
    start = order if start is None else start
    y = x[start:]
    z = np.concatenate([x[start - k:t - k] for k in range(1, order + 1)], axis=1)
    return y, z


def _column_name(col: int, n_vars: int) -> str:
    lag, unit = divmod(col, n_vars)
    return f"x{unit}(lag {lag + 1})"


def _ols(y: np.ndarray, z: np.ndarray, n_vars: int):
    gram = z.T @ z
    scale = np.sqrt(np.diag(gram))
    if np.any(scale == 0):
        cols = [_column_name(c, n_vars) for c in np.flatnonzero(scale == 0)]
        raise SingularMatrixError(f"regressor Gram matrix is singular; zero columns: {cols}")
    # equilibrated Gram, so the check is scale-free
    g = gram / np.outer(scale, scale)
    w, v = np.linalg.eigh(g)
    if w[0] < GRAM_RCOND * w[-1]:
        involved = np.flatnonzero(np.abs(v[:, 0]) > 0.1)
        cols = [_column_name(c, n_vars) for c in involved]
        raise SingularMatrixError(
            f"regressor Gram matrix is singular (rcond {w[0] / w[-1]:.3g}); "
            f"collinear columns: {cols}"
        )
    b = np.linalg.solve(gram, z.T @ y)
    resid = y - z @ b
    return b, resid


def _unstack(b: np.ndarray, order: int, n_vars: int) -> np.ndarray:
    return b.T.reshape(n_vars, order, n_vars).transpose(1, 0, 2)


def estimate_var(series: TimeSeries, order: int) -> VarModel:
    """Ordinary least squares fit of a VAR(order) without intercept.

    The series is mean-centered first (the removed means are kept on the
    returned model). The innovation covariance uses divisor ``T - order``.
    """
    if order < 1:
        raise InputError("order must be >= 1")
    t, n = series.data.shape
    if t <= n * order + 1:
        raise InputError(
            f"series too short: need T > N*order + 1 = {n * order + 1}, got T={t}"
        )
    mean = series.data.mean(axis=0)
    x = series.data - mean
    y, z = lag_design(x, order)
    b, resid = _ols(y, z, n)
    cov = resid.T @ resid / (t - order)
    return VarModel(_unstack(b, order, n), 0.5 * (cov + cov.T), mean=mean)


class OrderSelection(NamedTuple):
    order: int
    criteria: np.ndarray  # BIC for orders 1..max_order
    flat: bool


def select_order(series: TimeSeries, max_order: int) -> OrderSelection:
    """Bayesian information criterion over orders ``1..max_order``.

    All orders are fit on the same trailing ``T - max_order`` samples;
    ``BIC(p) = ln det S(p) + ln(T_eff) p N^2 / T_eff``. Ties go to the smaller
    order. ``flat`` is set when the whole criterion range is smaller than the
    penalty of a single extra lag.
    """
    if max_order < 1:
        raise InputError("max_order must be >= 1")
    t, n = series.data.shape
    if t <= n * max_order + 1:
        raise InputError(
            f"series too short: need T > N*max_order + 1 = {n * max_order + 1}, got T={t}"
        )
    x = series.data - series.data.mean(axis=0)
    t_eff = t - max_order
    crit = np.empty(max_order)
    for p in range(1, max_order + 1):
        y, z = lag_design(x, p, start=max_order)
        _, resid = _ols(y, z, n)
        cov = resid.T @ resid / t_eff
        sign, logdet = np.linalg.slogdet(cov)
        if sign <= 0:
            raise SingularMatrixError(f"residual covariance is singular at order {p}")
        crit[p - 1] = logdet + math.log(t_eff) * p * n * n / t_eff
    best = int(np.argmin(crit)) + 1
    flat = bool(np.ptp(crit) < math.log(t_eff) * n * n / t_eff)
    return OrderSelection(best, crit, flat)


# --------------------------------------------------------------------------
# file formats
# --------------------------------------------------------------------------

def read_csv(path, header: bool = False) -> TimeSeries:
    """Read a numeric CSV (one row per sample) into a :class:`TimeSeries`."""
    text = Path(path).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    labels = None
    if header:
        if not rows:
            raise InputError("CSV is empty")
        labels = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise InputError("CSV has no data rows")
    width = len(labels) if labels is not None else len(rows[0])
    data = np.empty((len(rows), width))
    first = 2 if header else 1
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InputError(
                f"ragged CSV: row {i + first} has {len(row)} columns, expected {width}"
            )
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise InputError(
                    f"non-numeric cell {cell!r} at row {i + first}, column {j + 1}"
                ) from None
    return TimeSeries(data, labels)


def write_csv(series: TimeSeries, path, header: bool = False) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(series.labels or [f"x{i + 1}" for i in range(series.n_vars)])
    for row in series.data:
        w.writerow([repr(float(v)) for v in row])
    Path(path).write_text(buf.getvalue())


def load_model(path) -> VarModel:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc
    return VarModel.from_dict(d)


def save_model(model: VarModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2))

