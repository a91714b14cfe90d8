"""Hot inner loops, with numba and pure-numpy implementations.

The numba path is used when numba imports and ``PREDINFO_USE_NUMBA`` is not
set to ``0``. Both paths are always importable under explicit names
(``*_numba`` / ``*_numpy``) so tests and the benchmark can compare them.
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("PREDINFO_USE_NUMBA", "1") != "0"


# --------------------------------------------------------------------------
# VAR recursion: x[n] = sum_k A_k x[n-k] + u[n], zero initial state
# --------------------------------------------------------------------------

def var_recursion_numpy(coeffs, noise):
    p, n_vars, _ = coeffs.shape
    n_total = noise.shape[0]
    x = np.zeros((n_total + p, n_vars))
    if p == 0:
        x[p:] = noise
        return x[p:]
    # stacked [A_1 ... A_p] acting on [x_{n-1}; ...; x_{n-p}]
    a_cat = np.concatenate(list(coeffs), axis=1)
    for n in range(n_total):
        past = x[n:n + p][::-1].ravel()
        x[n + p] = a_cat @ past + noise[n]
    return x[p:]


def moebius_numpy(red, order, indptr, indices):
    info = np.zeros_like(red)
    for i in order:
        below = indices[indptr[i]:indptr[i + 1]]
        info[i] = red[i] - info[below].sum()
    return info


def leq_matrix_numpy(parts_mask, up_mask, chunk=512):
    # a <= b  iff  every part of b is a superset of some part of a
    n = parts_mask.shape[0]
    out = np.empty((n, n), dtype=np.bool_)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        out[start:stop] = (parts_mask[None, :] & ~up_mask[start:stop, None]) == 0
    return out


if HAS_NUMBA:

    @njit(cache=True)
    def var_recursion_numba(coeffs, noise):
        p, n_vars, _ = coeffs.shape
        n_total = noise.shape[0]
        x = np.zeros((n_total + p, n_vars))
        for n in range(n_total):
            t = n + p
            for i in range(n_vars):
                acc = noise[n, i]
                for k in range(p):
                    for j in range(n_vars):
                        acc += coeffs[k, i, j] * x[t - k - 1, j]
                x[t, i] = acc
        return x[p:]

    @njit(cache=True)
    def moebius_numba(red, order, indptr, indices):
        info = np.zeros_like(red)
        for i in order:
            s = red[i]
            for j in indices[indptr[i]:indptr[i + 1]]:
                s -= info[j]
            info[i] = s
        return info

    @njit(cache=True)
    def leq_matrix_numba(parts_mask, up_mask):
        n = parts_mask.shape[0]
        out = np.empty((n, n), dtype=np.bool_)
        for a in range(n):
            up = up_mask[a]
            for b in range(n):
                out[a, b] = (parts_mask[b] & ~up) == 0
        return out

else:  # pragma: no cover
    var_recursion_numba = var_recursion_numpy
    moebius_numba = moebius_numpy
    leq_matrix_numba = leq_matrix_numpy


if USE_NUMBA:
    var_recursion = var_recursion_numba
    moebius = moebius_numba
    leq_matrix = leq_matrix_numba
else:
    var_recursion = var_recursion_numpy
    moebius = moebius_numpy
    leq_matrix = leq_matrix_numpy
