import numpy as np
import pytest

from predinfo.var_model import VarModel, check_stability


def random_stable_model(rng, n_vars, order, radius=None, coupled=True):
    """Random VAR with companion spectral radius rescaled to ``radius``."""
    radius = rng.uniform(0.3, 0.9) if radius is None else radius
    coeffs = rng.normal(size=(order, n_vars, n_vars))
    if not coupled:
        coeffs *= np.eye(n_vars)
    r0 = check_stability(VarModel(coeffs, np.eye(n_vars))).radius
    s = radius / r0
    coeffs = coeffs * s ** np.arange(1, order + 1)[:, None, None]
    w = rng.normal(size=(n_vars, n_vars))
    cov = w @ w.T / n_vars + 0.2 * np.eye(n_vars)
    return VarModel(coeffs, cov)


def lagged_plugin_mi(x, subset, q):
    """Brute-force 1/2 ln(det S_X / det S_W): OLS of X_n on q lags of X^subset.

    The Gram matrix is accumulated from shifted products so the T x (q|M|)
    design matrix is never materialized.
    """
    x = x - x.mean(axis=0)
    t = x.shape[0]
    xs = x[:, list(subset)]
    m = xs.shape[1]
    y = x[q:]
    lagged = [xs[q - k:t - k] for k in range(1, q + 1)]
    gram = np.empty((q * m, q * m))
    cross = np.empty((q * m, x.shape[1]))
    for j in range(q):
        cross[j * m:(j + 1) * m] = lagged[j].T @ y
        for k in range(j, q):
            b = lagged[j].T @ lagged[k]
            gram[j * m:(j + 1) * m, k * m:(k + 1) * m] = b
            gram[k * m:(k + 1) * m, j * m:(j + 1) * m] = b.T
    beta = np.linalg.solve(gram, cross)
    n = y.shape[0]
    resid_cov = (y.T @ y - cross.T @ beta) / n
    sx = x.T @ x / t
    return 0.5 * (np.linalg.slogdet(sx)[1] - np.linalg.slogdet(resid_cov)[1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one "PASS/FAIL criterion ..." line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
