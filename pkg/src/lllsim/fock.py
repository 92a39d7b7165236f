"""Truncated Bargmann-Fock representation u(z) = sum_n c_n phi_n(z).

The basis functions phi_n(z) = z^n e^{-|z|^2/2} / sqrt(pi n!) are orthonormal
for Lebesgue measure on C, so the coefficient vector carries the L^2
structure exactly (Parseval).  Weighted norms reduce to diagonal sums because
radial weights kill every angular cross term:

    || w(|z|)^(1/2) u ||^2 = sum_n |c_n|^2 I_n,
    I_n = (2/n!) \\int_0^inf w(r) r^(2n+1) e^{-r^2} dr.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .quadrature import LOG_PI, PolarGrid, default_radius, grid_lp_norm, grid_values, polar_grid

#: floor for the denominator of the tail-mass ratio (guards the zero vector)
MASS_FLOOR = 1e-30

#: a vector is "resolved" when its top mode carries less than this fraction
TAIL_TOL = 1e-10

#: sharp constant in ||u||_inf <= pi^(-1/2) ||u||_2 on the Fock space
SUP_NORM_CONSTANT = 1.0 / np.sqrt(np.pi)


class ResolutionError(RuntimeError):
    """Truncation too small for the requested operation."""


@dataclass(frozen=True)
class FockVector:
    """Immutable truncated coefficient vector."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or len(c) == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValueError("coefficients must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation(self) -> int:
        return len(self.coeffs)


def fock(coeffs) -> FockVector:
    return FockVector(np.asarray(coeffs, dtype=np.complex128))


def zero_vector(truncation: int) -> FockVector:
    return FockVector(np.zeros(truncation, dtype=np.complex128))


def basis_vector(n: int, truncation: int) -> FockVector:
    if not 0 <= n < truncation:
        raise ValueError("basis index outside truncation")
    c = np.zeros(truncation, dtype=np.complex128)
    c[n] = 1.0
    return FockVector(c)


def coherent_vector(gamma: complex, truncation: int) -> FockVector:
    """Coefficients e^{-|gamma|^2/2} gamma^m / sqrt(m!)."""
    m = np.arange(truncation)
    if gamma == 0:
        return basis_vector(0, truncation)
    log_mag = m * np.log(abs(gamma)) - 0.5 * gammaln(m + 1.0) - 0.5 * abs(gamma) ** 2
    phase = np.exp(1j * m * np.angle(gamma))
    return FockVector(np.exp(log_mag) * phase)


def random_unit_vector(rng: np.random.Generator, truncation: int) -> FockVector:
    c = rng.standard_normal(truncation) + 1j * rng.standard_normal(truncation)
    return FockVector(c / np.linalg.norm(c))


def random_resolved_vector(rng: np.random.Generator, truncation: int,
                           mode_scale: float | None = None) -> FockVector:
    """Random unit vector with Gaussian-decaying coefficients, so the tail is
    far below the resolution threshold (needed e.g. before translating)."""
    if mode_scale is None:
        mode_scale = truncation / 6.0
    n = np.arange(truncation)
    c = (rng.standard_normal(truncation) + 1j * rng.standard_normal(truncation))
    c = c * np.exp(-((n / mode_scale) ** 2))
    return FockVector(c / np.linalg.norm(c))


def l2_norm(u: FockVector) -> float:
    return float(np.linalg.norm(u.coeffs))


def inner(u: FockVector, w: FockVector) -> complex:
    """<u, w> = integral of u * conj(w)."""
    return complex(np.sum(u.coeffs * np.conj(w.coeffs)))


def tail_mass(u: FockVector) -> float:
    total = float(np.sum(np.abs(u.coeffs) ** 2))
    return float(np.abs(u.coeffs[-1]) ** 2) / max(total, MASS_FLOOR)


def is_resolved(u: FockVector, tol: float = TAIL_TOL) -> bool:
    return tail_mass(u) <= tol


def require_resolved(u: FockVector, tol: float = TAIL_TOL, what: str = "vector") -> None:
    t = tail_mass(u)
    if t > tol:
        raise ResolutionError(f"{what} unresolved: tail mass {t:.3e} > {tol:.1e}")


# -- weighted norms ---------------------------------------------------------

@dataclass(frozen=True)
class WeightSpec:
    """Radial weight: kind 'polynomial' means <z>^(2s), 'exponential' e^{2 kappa |z|}
    inside the squared norm, i.e. the norms ||<z>^s u|| and ||e^{kappa|z|} u||."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("polynomial", "exponential"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.value < 0:
            raise ValueError("weight parameter must be >= 0")

    def log_weight(self, r: np.ndarray) -> np.ndarray:
        """log w(r) of the squared-norm weight."""
        r = np.asarray(r, dtype=float)
        if self.kind == "polynomial":
            return self.value * np.log1p(r ** 2)
        return 2.0 * self.value * r

    @property
    def is_trivial(self) -> bool:
        return self.value == 0.0


@dataclass(frozen=True)
class RadialWeightTable:
    weights: np.ndarray      # I_n, n < truncation
    spec: WeightSpec
    truncation: int


def build_weight_table(spec: WeightSpec, truncation: int, rel_tol: float = 1e-12) -> RadialWeightTable:
    """I_n by adaptive quadrature of the log-scaled integrand on [0, R]."""
    if spec.is_trivial:
        return RadialWeightTable(np.ones(truncation), spec, truncation)
    kappa = spec.value if spec.kind == "exponential" else 0.0
    R = default_radius(truncation, kappa)
    out = np.empty(truncation)
    for n in range(truncation):
        lg = gammaln(n + 1.0)

        def integrand(r, n=n, lg=lg):
            if r <= 0.0:
                return 0.0
            return 2.0 * np.exp((2 * n + 1) * np.log(r) - r * r - lg
                                + spec.log_weight(r))

        peak = np.sqrt(n + 0.5) + kappa
        val, _ = quad(integrand, 0.0, R, epsabs=0.0, epsrel=rel_tol,
                      limit=400, points=[min(peak, R)])
        out[n] = val
    if np.any(out <= 0.0) or not np.all(np.isfinite(out)):
        raise ArithmeticError("weight table entries must be finite and positive")
    return RadialWeightTable(out, spec, truncation)


def weighted_l2_norm(u: FockVector, table: RadialWeightTable) -> float:
    if table.truncation != u.truncation:
        raise ValueError("weight table built for a different truncation")
    return float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2 * table.weights)))


# -- pointwise evaluation ---------------------------------------------------

def evaluate(u: FockVector, z) -> np.ndarray | complex:
    """u(z) at arbitrary points, with log-scaled term magnitudes."""
    zz = np.asarray(z, dtype=np.complex128)
    scalar = zz.ndim == 0
    pts = np.atleast_1d(zz).ravel()
    n = np.arange(u.truncation)
    rho = np.abs(pts)
    phi = np.angle(pts)
    with np.errstate(divide="ignore"):
        logrho = np.where(rho > 0.0, np.log(rho), -np.inf)
    expo = n[:, None] * logrho[None, :] - 0.5 * rho[None, :] ** 2 \
        - 0.5 * gammaln(n + 1.0)[:, None] - 0.5 * LOG_PI
    terms = np.exp(expo + 1j * n[:, None] * phi[None, :])
    if np.any(rho == 0.0):
        at0 = rho == 0.0
        terms[:, at0] = 0.0
        terms[0, at0] = np.exp(-0.5 * LOG_PI)
    vals = u.coeffs @ terms
    vals = vals.reshape(np.atleast_1d(zz).shape)
    return complex(vals[()]) if scalar else vals


@lru_cache(maxsize=8)
def _scan_grid(truncation: int) -> PolarGrid:
    return polar_grid(truncation, n_r=2 * truncation + 96)


def sup_norm_estimate(u: FockVector, grid: PolarGrid | None = None,
                      grid_tolerance: float = 1e-6) -> float:
    """max |u| over a polar grid plus the origin.

    The grid radius must satisfy R^2/2 >= log(||u||_2 / tol) so the Gaussian
    tail beyond it is negligible; the default grid always does.  A value
    above the sharp bound pi^(-1/2) ||u||_2 means the evaluation (not the
    grid) is broken, so that case raises.
    """
    if grid is None:
        grid = _scan_grid(u.truncation)
    nrm = l2_norm(u)
    if nrm == 0.0:
        return 0.0
    if grid.radius ** 2 / 2.0 < np.log(max(nrm, 1.0) / 1e-12):
        raise ValueError("scan grid radius too small for the Gaussian tail")
    best = float(np.max(np.abs(grid_values(u.coeffs, grid))))
    best = max(best, abs(evaluate(u, 0.0)))
    bound = SUP_NORM_CONSTANT * nrm
    if best > bound * (1.0 + grid_tolerance):
        raise ArithmeticError(
            f"sup estimate {best:.12e} violates the L2 bound {bound:.12e}")
    return best


def _lp_factor(p: float) -> float:
    # (p / 2 pi)^(1/p), with the p -> inf limit equal to 1
    if np.isinf(p):
        return 1.0
    return float((p / (2.0 * np.pi)) ** (1.0 / p))


def carlen_check(u: FockVector, p: float, q: float,
                 grid: PolarGrid | None = None, tol: float = 1e-9) -> bool:
    """Hypercontractive comparison (q/2pi)^{1/q} ||u||_q <= (p/2pi)^{1/p} ||u||_p.

    Norms come from polar quadrature; the result is validated against a
    refined grid and the call fails if the two quadratures disagree.
    """
    if not 1.0 <= p <= q:
        raise ValueError("need 1 <= p <= q")
    if grid is None:
        grid = _scan_grid(u.truncation)
    fine = polar_grid(u.truncation, n_r=len(grid.r) + 64,
                      n_theta=grid.n_theta, radius=grid.radius)

    def side(g: PolarGrid, expo: float) -> float:
        # sup norms come from the scanner (origin included); the two-grid
        # convergence check only makes sense for the integral norms
        if np.isinf(expo):
            return sup_norm_estimate(u, grid=g)
        return grid_lp_norm(grid_values(u.coeffs, g), g, expo)

    lhs, rhs = _lp_factor(q) * side(grid, q), _lp_factor(p) * side(grid, p)
    scale = max(rhs, 1e-300)
    for expo, val in ((q, lhs / _lp_factor(q)), (p, rhs / _lp_factor(p))):
        if not np.isinf(expo):
            refined = side(fine, expo)
            if abs(val - refined) / scale > 1e-7:
                raise ArithmeticError("Lp quadrature did not converge")
    return lhs <= rhs + tol * max(rhs, 1.0)


# -- JSON snapshots ---------------------------------------------------------

def to_json_dict(u: FockVector) -> dict:
    return {"n": u.truncation,
            "re": [float(x) for x in u.coeffs.real],
            "im": [float(x) for x in u.coeffs.imag]}


def from_json_dict(d: dict) -> FockVector:
    n = int(d["n"])
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d["im"], dtype=float)
    if len(re) != n or len(im) != n:
        raise ValueError("snapshot length fields disagree")
    return FockVector(re + 1j * im)
