"""Stationary autocovariances of a VAR model and restricted (subset) models.

The autocovariance ``Gamma_k = E[X_n X_{n-k}^T]`` is obtained from the
companion-form Lyapunov equation; restricted models regressing the full
present ``X_n`` on ``q`` lags of a subset of units are then solved from the
Yule-Walker equations built on blocks of ``Gamma``, with no refitting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg

from .errors import InputError, NumericalError, SingularMatrixError
from .var_model import VarModel, _frozen, require_stationary

DEFAULT_Q = 20
LYAPUNOV_RTOL = 1e-12
# largest companion dimension solved through the Kronecker system
DIRECT_MAX_DIM = 60
# R is treated as singular above this 2-norm condition number
COND_LIMIT = 1e12


def _lyap_residual(a, q, x):
    return np.linalg.norm(x - a @ x @ a.T - q)


def solve_discrete_lyapunov(a: np.ndarray, q: np.ndarray, method: str = "auto") -> np.ndarray:
    """Solve ``X = A X A^T + Q`` for symmetric ``Q`` and stable ``A``.

    ``method`` is ``"direct"`` (Kronecker-vectorised linear solve followed by
    one step of iterative refinement), ``"doubling"`` (squared-transition
    fixed point iteration) or ``"auto"``, which picks direct for dimension up
    to 60. Raises :class:`NumericalError` when the Frobenius residual exceeds
    ``1e-12 * ||Q||``.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    d = a.shape[0]
    if d == 0:
        return np.zeros((0, 0))
    if method == "auto":
        method = "direct" if d <= DIRECT_MAX_DIM else "doubling"

    if method == "direct":
        lhs = np.eye(d * d) - np.kron(a, a)
        lu = scipy.linalg.lu_factor(lhs)
        x = scipy.linalg.lu_solve(lu, q.ravel()).reshape(d, d)
        x = 0.5 * (x + x.T)
        r = q - (x - a @ x @ a.T)
        x += scipy.linalg.lu_solve(lu, r.ravel()).reshape(d, d)
    elif method == "doubling":
        x = q.copy()
        ak = a.copy()
        for _ in range(100):
            x = x + ak @ x @ ak.T
            ak = ak @ ak
            if np.abs(ak).max() < 1e-18:
                break
        else:
            raise NumericalError("Lyapunov doubling did not converge")
    else:
        raise InputError(f"unknown Lyapunov method {method!r}")

    x = 0.5 * (x + x.T)
    res = _lyap_residual(a, q, x)
    tol = LYAPUNOV_RTOL * max(np.linalg.norm(q), np.finfo(float).tiny)
    if not res < tol:
        raise NumericalError(
            f"Lyapunov residual {res:.3e} exceeds tolerance {tol:.3e}"
        )
    return x


@dataclass(frozen=True)
class LagCovarianceSet:
    """Autocovariance sequence ``Gamma_0 .. Gamma_K``; ``Gamma_0`` is the process covariance."""

    gammas: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 3 or g.shape[1] != g.shape[2] or g.shape[0] < 1:
            raise InputError(f"gammas must have shape (K+1, N, N), got {g.shape}")
        object.__setattr__(self, "gammas", _frozen(g))

    @property
    def max_lag(self) -> int:
        return self.gammas.shape[0] - 1

    @property
    def n_vars(self) -> int:
        return self.gammas.shape[1]

    @property
    def sigma_x(self) -> np.ndarray:
        return self.gammas[0]

    def gamma(self, k: int) -> np.ndarray:
        """``E[X_n X_{n-k}^T]`` for any integer ``|k| <= max_lag``."""
        return self.gammas[k] if k >= 0 else self.gammas[-k].T

    def block_toeplitz(self, n_lags: int, subset=None) -> np.ndarray:
        """Covariance of the lag stack ``[X_{n-1}; ...; X_{n-n_lags}]`` (optionally restricted)."""
        idx = np.arange(self.n_vars) if subset is None else np.asarray(subset)
        m = len(idx)
        g = self.gammas[:n_lags][:, idx][:, :, idx]
        # lags -(n_lags-1) .. n_lags-1
        both = np.concatenate([g[:0:-1].transpose(0, 2, 1), g])
        lag = np.arange(n_lags)[None, :] - np.arange(n_lags)[:, None]
        blocks = both[lag + n_lags - 1]  # (j, k, m, m) = Gamma_{k-j}
        return blocks.transpose(0, 2, 1, 3).reshape(n_lags * m, n_lags * m)

    def to_dict(self) -> dict:
        return {"max_lag": self.max_lag, "gammas": [g.tolist() for g in self.gammas]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def lag_covariances(model: VarModel, max_lag: int, method: str = "auto") -> LagCovarianceSet:
    """Autocovariances up to ``max_lag`` of a stationary VAR model.

    Solves ``S = A S A^T + Xi`` for the companion state covariance, reads
    ``Gamma_0 .. Gamma_{p-1}`` from its first block row and extends with
    ``Gamma_k = sum_j A_j Gamma_{k-j}``.
    """
    if max_lag < 0:
        raise InputError("max_lag must be >= 0")
    require_stationary(model)
    n, p = model.n_vars, model.order
    gammas = np.zeros((max_lag + 1, n, n))
    if p == 0:
        gammas[0] = model.innov_cov
        return LagCovarianceSet(gammas)
    comp = model.companion()
    xi = np.zeros_like(comp)
    xi[:n, :n] = model.innov_cov
    s = solve_discrete_lyapunov(comp, xi, method=method)
    head = min(p, max_lag + 1)
    for k in range(head):
        gammas[k] = s[:n, k * n:(k + 1) * n]
    gammas[0] = 0.5 * (gammas[0] + gammas[0].T)
    if max_lag >= p:
        # lags below p may be needed with negative index: Gamma_{-m} = Gamma_m^T
        full = [s[:n, k * n:(k + 1) * n] for k in range(p)]
        for k in range(p, max_lag + 1):
            g = np.zeros((n, n))
            for j in range(1, p + 1):
                g += model.coeffs[j - 1] @ full[k - j]
            full.append(g)
            gammas[k] = g
    return LagCovarianceSet(gammas)


@dataclass(frozen=True)
class RestrictedModel:
    """Regression of the full present ``X_n`` on ``order`` lags of ``X^subset``.

    ``coeffs[k - 1]`` is the N x |subset| coefficient block at lag ``k``.
    """

    subset: tuple
    order: int
    coeffs: np.ndarray
    resid_cov: np.ndarray
    regularized: bool = False


def _normalize_subset(subset: Iterable[int], n_vars: int) -> tuple:
    s = tuple(sorted(set(int(i) for i in subset)))
    if not s:
        raise InputError("subset must be non-empty")
    if s[0] < 0 or s[-1] >= n_vars:
        raise InputError(f"subset {s} out of range for {n_vars} units")
    return s


def restricted_model(
    cov: LagCovarianceSet, subset: Iterable[int], q: int = DEFAULT_Q, ridge: bool = True
) -> RestrictedModel:
    """Solve the Yule-Walker equations of the restricted model on ``subset``.

    ``subset`` holds 0-based unit indices. If the regressor covariance is
    numerically singular and ``ridge`` is true, the solve is retried once
    with ``1e-10 * trace(R) / dim(R)`` added to the diagonal and the result
    is flagged as regularized.
    """
    if q < 1:
        raise InputError("restricted order q must be >= 1")
    if cov.max_lag < q:
        raise InputError(f"need autocovariances up to lag {q}, have {cov.max_lag}")
    idx = _normalize_subset(subset, cov.n_vars)
    m = len(idx)
    r = cov.block_toeplitz(q, idx)
    c = np.concatenate([cov.gammas[k][:, idx] for k in range(1, q + 1)], axis=1)

    regularized = False
    factor = _cholesky_checked(r)
    if factor is None:
        if not ridge:
            raise SingularMatrixError(
                f"regressor covariance singular for subset {idx}, q={q}"
            )
        eps = 1e-10 * np.trace(r) / r.shape[0]
        factor = _cholesky_checked(r + eps * np.eye(r.shape[0]))
        regularized = True
        if factor is None:
            raise SingularMatrixError(
                f"regressor covariance singular for subset {idx}, q={q} (ridge retry failed)"
            )
    # C R^{-1} C^T = V^T V with V = L^{-1} C^T
    v = scipy.linalg.solve_triangular(factor, c.T, lower=True)
    coeffs = scipy.linalg.solve_triangular(factor.T, v, lower=False).T
    resid = cov.gammas[0] - v.T @ v
    resid = 0.5 * (resid + resid.T)
    coeffs = coeffs.reshape(cov.n_vars, q, m).transpose(1, 0, 2)
    return RestrictedModel(idx, q, _frozen(coeffs), _frozen(resid), regularized)


def _cholesky_checked(r):
    w = np.linalg.eigvalsh(r)
    if w[0] <= 0 or w[-1] > COND_LIMIT * w[0]:
        return None
    try:
        return np.linalg.cholesky(r)
    except np.linalg.LinAlgError:
        return None
