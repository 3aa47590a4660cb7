"""Benchmark the numba kernels against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

The numba path is whatever `qcqp_hull._kernels` resolved at import; set
QCQP_HULL_NUMBA=0 to make the whole package run on the numpy path instead.
"""

import time

import numpy as np

from qcqp_hull import _kernels

REPS = 5


def timed(fn, *args, reps=REPS):
    fn(*args)  # warmup (JIT compile on the numba path)
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi(n, rng):
    S = rng.normal(size=(n, n))
    S = 0.5 * (S + S.T)
    rows = []
    if _kernels.HAS_NUMBA:
        rows.append(("numba", timed(_kernels._jacobi_eigh_numba, S, 1e-13, 100)))
    rows.append(("numpy", timed(_kernels._jacobi_eigh_numpy, S, 1e-13, 100)))
    return rows


def bench_eval(k, n, pts, rng):
    A = rng.normal(size=(k, n, n))
    A = 0.5 * (A + np.transpose(A, (0, 2, 1)))
    b = rng.normal(size=(k, n))
    c = rng.normal(size=k)
    X = rng.normal(size=(pts, n))
    rows = []
    if _kernels.HAS_NUMBA:
        rows.append(("numba", timed(_kernels._eval_quadratics_numba, A, b, c, X)))
    rows.append(("numpy", timed(_kernels._eval_quadratics_numpy, A, b, c, X)))
    return rows


def show(name, rows):
    base = dict(rows).get("numpy")
    for path, t in rows:
        speedup = f"  ({base / t:.1f}x vs numpy)" if path == "numba" and t > 0 else ""
        print(f"{name:34s} {path:6s} {t * 1e3:10.3f} ms{speedup}")


def main():
    rng = np.random.default_rng(0)
    print(f"active backend: {_kernels.backend()}")
    for n in (30, 80, 150):
        show(f"jacobi_eigh  N={n}", bench_jacobi(n, rng))
    for k, n, pts in ((3, 2, 160_000), (6, 6, 160_000), (4, 3, 1_000_000)):
        show(f"eval_quadratics K={k} N={n} P={pts}", bench_eval(k, n, pts, rng))


if __name__ == "__main__":
    main()
