"""Core operators: projected trilinear product, symmetries, propagator.

The projection of a pointwise product p * conj(q) * r back onto the Fock
space is diagonal in the total-degree constraint k + l = m + n, with

    out_k = (1/2pi) sum_{k+l=m+n} (k+l)! / (2^{k+l} sqrt(k! l! m! n!))
            * conj(q_l) p_m r_n.

The conjugated slot is always the second argument.  All factorial ratios are
evaluated once through log-Gamma when the table is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from . import kernels
from .fock import FockVector, ResolutionError, l2_norm, tail_mass
from .quadrature import PolarGrid, project_onto_basis

LOG2 = np.log(2.0)


@dataclass(frozen=True)
class TrilinearKernelTable:
    """Log-coefficients L(k, l, m, n) with l = m + n - k, plus the
    exponentiated values and clamped conjugate-index map used by the hot
    kernel (values are zero wherever the index was clamped)."""

    truncation: int
    log_coeffs: np.ndarray   # (N, N, N), -inf where l is out of range
    values: np.ndarray       # exp(log_coeffs)
    qidx: np.ndarray         # int32 clamp(m + n - k, 0, N - 1)


def build_kernel_table(truncation: int) -> TrilinearKernelTable:
    N = truncation
    lg = gammaln(np.arange(2 * N, dtype=float) + 1.0)
    idx = np.arange(N)
    s = idx[:, None] + idx[None, :]                     # m + n
    ell = s[None, :, :] - idx[:, None, None]            # l = m + n - k
    valid = (ell >= 0) & (ell < N)
    ell_c = np.clip(ell, 0, 2 * N - 1)
    log_c = (lg[s][None, :, :] - LOG2 * s[None, :, :]
             - 0.5 * (lg[idx][:, None, None] + lg[ell_c]
                      + lg[idx][None, :, None] + lg[idx][None, None, :]))
    log_c = np.where(valid, log_c, -np.inf)
    values = np.exp(log_c)
    qidx = np.clip(ell, 0, N - 1).astype(np.int32)
    return TrilinearKernelTable(N, np.ascontiguousarray(log_c),
                                np.ascontiguousarray(values),
                                np.ascontiguousarray(qidx))


def save_kernel_table(table: TrilinearKernelTable, path: str | Path) -> None:
    np.savez_compressed(path, truncation=table.truncation, log_coeffs=table.log_coeffs)


def load_kernel_table(path: str | Path) -> TrilinearKernelTable:
    """Load a cached table, spot-checking 8 entries against recomputation."""
    with np.load(path) as data:
        N = int(data["truncation"])
        log_c = data["log_coeffs"]
    fresh = build_kernel_table(N)
    rng = np.random.default_rng(N)
    for _ in range(8):
        k, m, n = rng.integers(0, N, size=3)
        a, b = log_c[k, m, n], fresh.log_coeffs[k, m, n]
        if a != b and not (np.isneginf(a) and np.isneginf(b)):
            raise ValueError(f"cached kernel table corrupt at {(k, m, n)}")
    return TrilinearKernelTable(N, log_c, np.exp(log_c), fresh.qidx)


def projected_triple(p: FockVector, q: FockVector, r: FockVector,
                     table: TrilinearKernelTable) -> FockVector:
    """Projection of p * conj(q) * r; symmetric in (p, r)."""
    N = table.truncation
    if not (p.truncation == q.truncation == r.truncation == N):
        raise ValueError("inputs and kernel table must share one truncation")
    out = kernels.triple_apply(table.values, table.qidx,
                               p.coeffs, np.conj(q.coeffs), r.coeffs)
    if not np.all(np.isfinite(out.view(np.float64))):
        raise FloatingPointError("non-finite output from trilinear product")
    return FockVector(out)


def projector_quadrature_oracle(values: np.ndarray, grid: PolarGrid,
                                truncation: int) -> FockVector:
    """Coefficients <f, phi_n> of a sampled Gaussian-decaying function.

    Independent 2-d quadrature route onto the Fock space; used as a test
    oracle for projected_triple and magnetic_translate.
    """
    c = project_onto_basis(values, grid, truncation)
    if not np.all(np.isfinite(c.view(np.float64))):
        raise ArithmeticError("projection quadrature produced non-finite values")
    return FockVector(c)


# -- symmetry group actions -------------------------------------------------

def _series_shift_matrix(N: int, alpha: complex) -> np.ndarray:
    """Maps normalized coefficients of f to those of z -> f(z + alpha)."""
    lg = gammaln(np.arange(N, dtype=float) + 1.0)
    j = np.arange(N)
    d = j[None, :] - j[:, None]                  # n - j, source index n in columns
    dc = np.clip(d, 0, N - 1)
    with np.errstate(divide="ignore"):
        log_a = np.log(abs(alpha)) if alpha != 0 else -np.inf
    logw = 0.5 * (lg[None, :] - lg[:, None]) - gammaln(dc + 1.0) + dc * log_a
    w = np.exp(logw) * np.exp(1j * dc * np.angle(alpha))
    return np.where(d >= 0, w, 0.0)


def _exp_mul(N: int, beta: complex) -> np.ndarray:
    """Maps normalized coefficients of f to those of z -> e^{beta z} f(z)."""
    lg = gammaln(np.arange(N, dtype=float) + 1.0)
    j = np.arange(N)
    d = j[:, None] - j[None, :]                  # k - j, source index j in columns
    dc = np.clip(d, 0, N - 1)
    with np.errstate(divide="ignore"):
        log_b = np.log(abs(beta)) if beta != 0 else -np.inf
    logw = 0.5 * (lg[:, None] - lg[None, :]) - gammaln(dc + 1.0) + dc * log_b
    w = np.exp(logw) * np.exp(1j * dc * np.angle(beta))
    return np.where(d >= 0, w, 0.0)


def magnetic_translate(u: FockVector, alpha: complex, *, check: bool = True,
                       tail_tol: float = 1e-10, norm_tol: float = 1e-6) -> FockVector:
    """R_alpha u: on the analytic part, a Taylor shift by alpha followed by a
    Cauchy product with the series of e^{-conj(alpha) z} and the scalar
    e^{-|alpha|^2/2}.  Unitary up to tail loss; the tail/norm guard rejects
    translations the truncation cannot resolve.
    """
    alpha = complex(alpha)
    if alpha == 0:
        return u
    N = u.truncation
    shifted = _series_shift_matrix(N, alpha) @ u.coeffs
    out = np.exp(-0.5 * abs(alpha) ** 2) * (_exp_mul(N, -np.conj(alpha)) @ shifted)
    result = FockVector(out)
    if check:
        nrm = l2_norm(u)
        if nrm > 0.0:
            if tail_mass(result) > tail_tol:
                raise ResolutionError(
                    f"translation by |alpha|={abs(alpha):.3g} unresolved at N={N}")
            if abs(l2_norm(result) - nrm) > norm_tol * nrm:
                raise ResolutionError(
                    f"translation by |alpha|={abs(alpha):.3g} lost norm at N={N}")
    return result


def rotate(u: FockVector, theta: float) -> FockVector:
    """L_theta u(z) = u(e^{i theta} z): c_n -> c_n e^{i n theta}."""
    n = np.arange(u.truncation)
    return FockVector(u.coeffs * np.exp(1j * n * theta))


def harmonic_propagate(u: FockVector, tau: float) -> FockVector:
    """e^{-i tau H} with H phi_n = 2(n+1) phi_n: c_n -> e^{-2i(n+1) tau} c_n."""
    n = np.arange(u.truncation)
    return FockVector(u.coeffs * np.exp(-2j * (n + 1) * tau))


# -- conserved quantities ---------------------------------------------------

@dataclass(frozen=True)
class ConservedQuantities:
    M_u: float
    M_v: float
    H: float
    P_minus: float
    Q_minus: complex


def conserved_quantities(u: FockVector, v: FockVector,
                         table: TrilinearKernelTable) -> ConservedQuantities:
    """Masses, interaction energy H = <Pi(|v|^2 u), u>, angular momentum
    P_- = sum n (|c_n|^2 - |d_n|^2) and magnetic momentum
    Q_- = sum sqrt(n+1) (conj(c_{n+1}) c_n - conj(d_{n+1}) d_n).

    The P_-/Q_- coefficient formulas are moment identities of |phi_n|^2 and
    the ladder action of z; they are validated against 2-d quadrature in the
    test suite before the monitors rely on them.
    """
    if u.truncation != v.truncation:
        raise ValueError("u and v must share one truncation")
    c, d = u.coeffs, v.coeffs
    n = np.arange(u.truncation)
    mu = float(np.sum(np.abs(c) ** 2))
    mv = float(np.sum(np.abs(d) ** 2))
    h = float(np.real(np.sum(projected_triple(v, v, u, table).coeffs * np.conj(c))))
    p_minus = float(np.sum(n * (np.abs(c) ** 2 - np.abs(d) ** 2)))
    root = np.sqrt(n[:-1] + 1.0)
    q_minus = complex(np.sum(root * (np.conj(c[1:]) * c[:-1] - np.conj(d[1:]) * d[:-1])))
    return ConservedQuantities(mu, mv, h, p_minus, q_minus)
