#!/usr/bin/env python3
"""Benchmark the trilinear-product backends (numba @njit vs pure numpy).

The product dominates integration time (8 evaluations per RK4 step), so this
is the number that decides wall-clock for every experiment.  Run with

    python benchmarks/bench_kernels.py [N ...]

Selecting LLLSIM_KERNEL=numpy only changes the default dispatch; both
implementations are timed here regardless.
"""

import sys
import time

import numpy as np

from lllsim import kernels
from lllsim.operators import build_kernel_table


def time_call(fn, *args, repeats: int = 20) -> float:
    fn(*args)                      # warm-up / JIT compile
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(sizes) -> None:
    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'N':>5} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}")
    for N in sizes:
        table = build_kernel_table(N)
        p, q, r = (rng.standard_normal(N) + 1j * rng.standard_normal(N) for _ in range(3))
        qbar = np.conj(q)
        t_np = time_call(kernels.triple_apply_numpy, table.values, table.qidx, p, qbar, r)
        row = f"{N:>5} {t_np * 1e3:>12.3f}"
        if hasattr(kernels, "triple_apply_numba"):
            t_nb = time_call(kernels.triple_apply_numba, table.values, table.qidx, p, qbar, r)
            ref = kernels.triple_apply_numpy(table.values, table.qidx, p, qbar, r)
            out = kernels.triple_apply_numba(table.values, table.qidx, p, qbar, r)
            assert np.allclose(out, ref, rtol=1e-12, atol=1e-14), "backend mismatch"
            row += f" {t_nb * 1e3:>12.3f} {t_np / t_nb:>8.1f}x"
        else:
            row += f" {'n/a':>12} {'n/a':>9}"
        print(row)


if __name__ == "__main__":
    sizes = [int(a) for a in sys.argv[1:]] or [16, 32, 64, 96, 128]
    main(sizes)
