"""Hot kernel for the projected trilinear product.

The coefficient-space product is

    out_k = (1/2pi) sum_{m,n} W(k, l, m, n) conj(q_l) p_m r_n,  l = m + n - k,

a cubic-cost double loop per output index.  Two interchangeable backends
implement it:

* ``numba``  - @njit, parallel over k.  Each out_k is accumulated by one
  thread in a fixed (m, n) order, so results are bit-identical for any
  thread count.
* ``numpy``  - vectorised einsum fallback, used when numba is unavailable
  or when the environment variable ``LLLSIM_KERNEL=numpy`` is set.

``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

INV_TWO_PI = 1.0 / (2.0 * np.pi)

_requested = os.environ.get("LLLSIM_KERNEL", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise RuntimeError(f"LLLSIM_KERNEL must be 'numba' or 'numpy', got {_requested!r}")

_have_numba = False
if _requested == "numba":
    try:
        from numba import njit, prange
        _have_numba = True
    except ImportError:
        warnings.warn("numba unavailable, falling back to the numpy kernel")

BACKEND = "numba" if _have_numba else "numpy"


def triple_apply_numpy(values: np.ndarray, qidx: np.ndarray,
                       p: np.ndarray, qbar: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Pure-numpy evaluation; `values` is zero wherever qidx is clamped."""
    gathered = qbar[qidx]
    out = np.einsum("kmn,kmn,m,n->k", values, gathered, p, r)
    return out * INV_TWO_PI


if _have_numba:

    @njit(parallel=True, cache=True)
    def _triple_loop(values, p, qbar, r, out):  # pragma: no cover - jitted
        N = p.shape[0]
        for k in prange(N):
            acc = 0.0 + 0.0j
            for m in range(N):
                lo = k - m if k > m else 0
                hi = N - m + k
                if hi > N:
                    hi = N
                for n in range(lo, hi):
                    acc += values[k, m, n] * qbar[m + n - k] * p[m] * r[n]
            out[k] = acc * INV_TWO_PI

    def triple_apply_numba(values: np.ndarray, qidx: np.ndarray,
                           p: np.ndarray, qbar: np.ndarray, r: np.ndarray) -> np.ndarray:
        out = np.empty_like(p)
        _triple_loop(values, p, qbar, r, out)
        return out

    triple_apply = triple_apply_numba
else:
    triple_apply = triple_apply_numpy


def set_threads(n: int) -> None:
    """Cap kernel threads (no-op for the numpy backend)."""
    if not _have_numba:
        return
    import numba

    try:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    except ValueError:
        pass
