import numpy as np
import pytest

from predinfo import _kernels
from predinfo.lattice import build_lattice

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")


@needs_numba
def test_var_recursion_paths_agree(rng):
    coeffs = rng.normal(scale=0.2, size=(3, 4, 4))
    noise = rng.normal(size=(500, 4))
    a = _kernels.var_recursion_numba(coeffs, noise)
    b = _kernels.var_recursion_numpy(coeffs, noise)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_var_recursion_order_zero_is_noise(rng):
    noise = rng.normal(size=(10, 2))
    np.testing.assert_array_equal(_kernels.var_recursion_numpy(np.zeros((0, 2, 2)), noise), noise)


def test_var_recursion_matches_explicit_loop():
    coeffs = np.array([[[0.5]], [[-0.2]]])
    noise = np.array([[1.0], [0.0], [0.0], [0.0]])
    # x0 = 1, x1 = .5, x2 = .25 - .2, x3 = .5*.05 - .2*.5
    expect = [1.0, 0.5, 0.05, 0.025 - 0.1]
    np.testing.assert_allclose(_kernels.var_recursion(coeffs, noise)[:, 0], expect)


@needs_numba
@pytest.mark.parametrize("n", [2, 3, 4])
def test_lattice_kernels_agree(n, rng):
    lat = build_lattice(n)
    red = rng.normal(size=len(lat))
    a = _kernels.moebius_numba(red, lat.order, lat.indptr, lat.indices)
    b = _kernels.moebius_numpy(red, lat.order, lat.indptr, lat.indices)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_leq_paths_agree():
    parts = np.array([0b001, 0b011, 0b100], dtype=np.int64)
    up = np.array([0b011, 0b010, 0b100], dtype=np.int64)
    np.testing.assert_array_equal(
        _kernels.leq_matrix_numpy(parts, up), _kernels.leq_matrix_numba(parts, up)
    )
