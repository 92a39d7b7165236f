"""Explicit traveling waves and stationary pairs.

The two-component family is built from the shifted basis functions
phi_n^gamma = R_{-conj(gamma)} phi_n:

    U = K e^{ia} ( phi_0^gamma / 2 + (sqrt3/2) i e^{i theta} phi_1^gamma )
    V = K e^{ib} ( phi_0^gamma / 2 - (sqrt3/2) i e^{i theta} phi_1^gamma )

with frequencies and speed

    lambda = (K^2/32pi) (+7 + 2 sqrt3 Im(gamma e^{-i theta}))
    mu     = (K^2/32pi) (-7 + 2 sqrt3 Im(gamma e^{-i theta}))
    alpha  = (sqrt3/32pi) K^2 e^{-i theta}.

The exact solution through (U, V) is X(t) = e^{-i lambda t} R_{alpha t} U,
Y(t) = e^{-i mu t} R_{alpha t} V.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import FockVector, basis_vector, inner, l2_norm, require_resolved, zero_vector
from .operators import TrilinearKernelTable, magnetic_translate, projected_triple

SQRT3 = np.sqrt(3.0)
SPEED_FACTOR = SQRT3 / (32.0 * np.pi)   # |alpha| = SPEED_FACTOR * K^2


@dataclass(frozen=True)
class WaveSpec:
    K: float
    a: float = 0.0
    b: float = 0.0
    theta: float = 0.0
    gamma: complex = 0.0

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("amplitude K must be >= 0")

    def to_json_dict(self) -> dict:
        return {"K": self.K, "a": self.a, "b": self.b, "theta": self.theta,
                "gamma_re": float(np.real(self.gamma)),
                "gamma_im": float(np.imag(self.gamma))}

    @classmethod
    def from_json_dict(cls, d: dict) -> "WaveSpec":
        return cls(K=float(d["K"]), a=float(d.get("a", 0.0)), b=float(d.get("b", 0.0)),
                   theta=float(d.get("theta", 0.0)),
                   gamma=complex(float(d.get("gamma_re", 0.0)), float(d.get("gamma_im", 0.0))))


@dataclass(frozen=True)
class DerivedParams:
    lam: float
    mu: float
    alpha: complex


def derive_params(w: WaveSpec) -> DerivedParams:
    shift = 2.0 * SQRT3 * np.imag(w.gamma * np.exp(-1j * w.theta))
    base = w.K ** 2 / (32.0 * np.pi)
    return DerivedParams(lam=base * (7.0 + shift), mu=base * (-7.0 + shift),
                         alpha=SPEED_FACTOR * w.K ** 2 * np.exp(-1j * w.theta))


def amplitude_for_speed(abs_alpha: float) -> float:
    """K giving a desired |alpha| (speeds are O(1) only for K^2 ~ 32pi/sqrt3)."""
    return float(np.sqrt(abs_alpha / SPEED_FACTOR))


def shifted_basis(n: int, gamma: complex, truncation: int) -> FockVector:
    """phi_n^gamma = R_{-conj(gamma)} phi_n."""
    return magnetic_translate(basis_vector(n, truncation), -np.conj(gamma))


@lru_cache(maxsize=64)
def _wave_pair_cached(w: WaveSpec, truncation: int) -> tuple[FockVector, FockVector]:
    p0 = shifted_basis(0, w.gamma, truncation)
    p1 = shifted_basis(1, w.gamma, truncation)
    half = 0.5 * p0.coeffs
    tilt = (SQRT3 / 2.0) * 1j * np.exp(1j * w.theta) * p1.coeffs
    u = FockVector(w.K * np.exp(1j * w.a) * (half + tilt))
    v = FockVector(w.K * np.exp(1j * w.b) * (half - tilt))
    return u, v


def build_wave_pair(w: WaveSpec, truncation: int) -> tuple[FockVector, FockVector]:
    """Initial pair (U, V); both have L2 norm K up to tail loss."""
    if w.K == 0.0:
        z = zero_vector(truncation)
        return z, z
    u, v = _wave_pair_cached(w, truncation)
    require_resolved(u, what="wave profile")
    return u, v


def soliton_profile(w: WaveSpec, t: float, truncation: int) -> tuple[FockVector, FockVector]:
    """Exact profiles (X(t), Y(t)) of the wave through (U, V)."""
    u, v = build_wave_pair(w, truncation)
    if w.K == 0.0 or t == 0.0:
        return u, v
    d = derive_params(w)
    x = magnetic_translate(u, d.alpha * t)
    y = magnetic_translate(v, d.alpha * t)
    return (FockVector(np.exp(-1j * d.lam * t) * x.coeffs),
            FockVector(np.exp(-1j * d.mu * t) * y.coeffs))


def ansatz_residual(w: WaveSpec, t: float, dt_fd: float,
                    table: TrilinearKernelTable, truncation: int | None = None) -> float:
    """|| i dX/dt - Pi(|Y|^2 X) || + || i dY/dt + Pi(|X|^2 Y) || with a
    central finite difference in t (second order in dt_fd)."""
    N = table.truncation if truncation is None else truncation
    if w.K == 0.0:
        return 0.0
    xp, yp = soliton_profile(w, t + dt_fd, N)
    xm, ym = soliton_profile(w, t - dt_fd, N)
    x, y = soliton_profile(w, t, N)
    dx = 1j * (xp.coeffs - xm.coeffs) / (2.0 * dt_fd)
    dy = 1j * (yp.coeffs - ym.coeffs) / (2.0 * dt_fd)
    ru = dx - projected_triple(y, y, x, table).coeffs
    rv = dy + projected_triple(x, x, y, table).coeffs
    return float(np.linalg.norm(ru) + np.linalg.norm(rv))


def build_stationary_pair(n1: int, n2: int, a1: complex, a2: complex,
                          gamma: complex, truncation: int) -> tuple[FockVector, FockVector]:
    """Zero-speed solutions (A1 phi_{n1}^gamma, A2 phi_{n2}^gamma)."""
    u = FockVector(a1 * shifted_basis(n1, gamma, truncation).coeffs)
    v = FockVector(a2 * shifted_basis(n2, gamma, truncation).coeffs)
    return u, v


@dataclass(frozen=True)
class StationaryFit:
    lambda_fit: float
    mu_fit: float
    residual_u: float
    residual_v: float

    @property
    def residual(self) -> float:
        return self.residual_u + self.residual_v


def stationary_check(u: FockVector, v: FockVector, sigma: int,
                     table: TrilinearKernelTable) -> StationaryFit:
    """Rayleigh-quotient frequencies for lambda U = Pi(|V|^2 U),
    mu V = sigma Pi(|U|^2 V), and the corresponding defect norms."""
    if l2_norm(u) == 0.0 or l2_norm(v) == 0.0:
        raise ValueError("stationary check needs nonzero components")
    pu = projected_triple(v, v, u, table)
    pv = projected_triple(u, u, v, table)
    lam = inner(pu, u) / l2_norm(u) ** 2
    mu = sigma * inner(pv, v) / l2_norm(v) ** 2
    res_u = float(np.linalg.norm(pu.coeffs - lam * u.coeffs))
    res_v = float(np.linalg.norm(sigma * pv.coeffs - mu * v.coeffs))
    return StationaryFit(float(np.real(lam)), float(np.real(mu)), res_u, res_v)


# -- ensembles ---------------------------------------------------------------

MODE_MULTI = "distinct-speeds"
MODE_SUPERPOSITION = "common-speed"


@dataclass(frozen=True)
class SolitonEnsemble:
    specs: tuple[WaveSpec, ...]
    mode: str

    def __post_init__(self):
        if self.mode not in (MODE_MULTI, MODE_SUPERPOSITION):
            raise ValueError(f"unknown ensemble mode {self.mode!r}")
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise ValueError("ensemble must contain at least one wave")
        if self.mode == MODE_MULTI:
            alphas = [derive_params(w).alpha for w in self.specs]
            if sum(1 for a in alphas if a == 0) > 1:
                raise ValueError("at most one zero-speed wave is allowed")
            for i in range(len(alphas)):
                for j in range(i + 1, len(alphas)):
                    if abs(alphas[i] - alphas[j]) < 1e-12:
                        raise ValueError("distinct-speeds ensemble has a duplicate speed")
        else:
            first = self.specs[0]
            for w in self.specs[1:]:
                if w.K != first.K or w.theta != first.theta:
                    raise ValueError("common-speed ensemble needs identical (K, theta)")
            gammas = [w.gamma for w in self.specs]
            for i in range(len(gammas)):
                for j in range(i + 1, len(gammas)):
                    if abs(gammas[i] - gammas[j]) < 1e-12:
                        raise ValueError("common-speed ensemble has duplicate centers")

    @property
    def alpha_sharp(self) -> float:
        """Minimum pairwise speed gap (distinct-speeds mode)."""
        if self.mode != MODE_MULTI or len(self.specs) < 2:
            return 0.0
        alphas = [derive_params(w).alpha for w in self.specs]
        return min(abs(alphas[i] - alphas[j])
                   for i in range(len(alphas)) for j in range(i + 1, len(alphas)))

    @property
    def separation(self) -> float:
        """Minimum pairwise center gap (common-speed mode)."""
        if len(self.specs) < 2:
            return 0.0
        g = [w.gamma for w in self.specs]
        return min(abs(g[i] - g[j]) for i in range(len(g)) for j in range(i + 1, len(g)))


def ensemble_profile_sum(ensemble: SolitonEnsemble, t: float,
                         truncation: int) -> tuple[FockVector, FockVector]:
    """Sum of the exact per-wave profiles at time t."""
    cu = np.zeros(truncation, dtype=np.complex128)
    cv = np.zeros(truncation, dtype=np.complex128)
    for w in ensemble.specs:
        x, y = soliton_profile(w, t, truncation)
        cu += x.coeffs
        cv += y.coeffs
    return FockVector(cu), FockVector(cv)
