"""Time the numba and pure-numpy kernels side by side.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from predinfo import _kernels
from predinfo.lattice import build_lattice, order_masks
from predinfo.sweep import three_unit_model


def cases():
    model = three_unit_model(0.3, 0.2)
    noise = np.random.default_rng(0).normal(size=(1_000_000, 3))
    coeffs = np.ascontiguousarray(model.coeffs)
    lat = build_lattice(5)
    parts, up = order_masks(5, lat.atoms)
    red = np.random.default_rng(1).normal(size=len(lat))
    return {
        "var_recursion (T=1e6, N=3, p=2)": ("var_recursion", (coeffs, noise)),
        "leq_matrix (N=5, 7579 atoms)": ("leq_matrix", (parts, up)),
        "moebius (N=5, 7579 atoms)": ("moebius", (red, lat.order, lat.indptr, lat.indices)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        print("numba is not installed; only the numpy path can be timed")
    print(f"{'kernel':36s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for label, (name, inputs) in cases().items():
        slow = getattr(_kernels, f"{name}_numpy")
        t_np = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat))
        if _kernels.HAS_NUMBA:
            fast = getattr(_kernels, f"{name}_numba")
            np.testing.assert_allclose(fast(*inputs), slow(*inputs), rtol=1e-12, atol=1e-9)
            t_nb = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
            print(f"{label:36s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")
        else:
            print(f"{label:36s} {t_np:10.4f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
