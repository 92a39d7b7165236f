"""Polar quadrature grids for the Gaussian-weighted plane.

Everything here works on raw coefficient arrays so the rest of the package
can build on it without circular imports.  A grid is Gauss-Legendre in the
radius on [0, R] and uniform in the angle; with ``n_theta >= 4N`` the
angular trapezoid rule is exact for the trigonometric polynomials that show
up in products of truncated basis expansions, so the radial rule is the only
source of quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

LOG_PI = np.log(np.pi)


def default_radius(truncation: int, kappa: float = 0.0) -> float:
    """Radius beyond which every retained mode (and an e^{kappa|z|} weight)
    is negligible at double precision."""
    return np.sqrt(2.0 * truncation) + 12.0 + 2.0 * kappa


@dataclass(frozen=True)
class PolarGrid:
    """Tensor-product quadrature nodes z = r * exp(i theta)."""

    r: np.ndarray          # radial Gauss-Legendre nodes on [0, R]
    wr: np.ndarray         # matching Gauss-Legendre weights
    n_theta: int
    radius: float

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def area_weights(self) -> np.ndarray:
        # dL = r dr dtheta; shape (n_r, 1) broadcasting over angles
        return (self.wr * self.r * (2.0 * np.pi / self.n_theta))[:, None]

    def nodes(self) -> np.ndarray:
        return self.r[:, None] * np.exp(1j * self.theta[None, :])

    def integrate(self, values: np.ndarray) -> complex:
        """Integrate a sampled function against Lebesgue measure on C."""
        return complex(np.sum(values * self.area_weights))


def polar_grid(truncation: int, kappa: float = 0.0, n_r: int | None = None,
               n_theta: int | None = None, radius: float | None = None) -> PolarGrid:
    R = default_radius(truncation, kappa) if radius is None else radius
    if n_r is None:
        n_r = 3 * truncation + 96
    if n_theta is None:
        n_theta = 4 * truncation
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * R * (x + 1.0)
    wr = 0.5 * R * w
    return PolarGrid(r=r, wr=wr, n_theta=n_theta, radius=R)


def radial_basis_matrix(truncation: int, r: np.ndarray) -> np.ndarray:
    """Radial profiles r^n e^{-r^2/2} / sqrt(pi n!), shape (N, n_r).

    Computed from the log of the magnitude so large n and large r never
    overflow; underflow to zero is harmless.
    """
    n = np.arange(truncation)
    rr = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        logr = np.where(rr > 0.0, np.log(rr), -np.inf)
    expo = n[:, None] * logr[None, :] - 0.5 * rr[None, :] ** 2 \
        - 0.5 * gammaln(n + 1.0)[:, None] - 0.5 * LOG_PI
    out = np.exp(expo)
    if np.any(rr == 0.0):
        # only the n = 0 profile survives at the origin
        at0 = rr == 0.0
        out[:, at0] = 0.0
        out[0, at0] = np.exp(-0.5 * LOG_PI)
    return out


def grid_values(coeffs: np.ndarray, grid: PolarGrid) -> np.ndarray:
    """Evaluate sum_n c_n phi_n on the grid, shape (n_r, n_theta).

    The angular sum is a length-n_theta inverse FFT per radius, which keeps
    grid evaluation cheap enough to use inside property suites.
    """
    N = len(coeffs)
    if N > grid.n_theta:
        raise ValueError("grid angular resolution below truncation")
    rad = radial_basis_matrix(N, grid.r)          # (N, n_r)
    g = (coeffs[:, None] * rad).T                 # (n_r, N)
    return np.fft.ifft(g, n=grid.n_theta, axis=1) * grid.n_theta


def project_onto_basis(values: np.ndarray, grid: PolarGrid, truncation: int) -> np.ndarray:
    """Coefficients <f, phi_n> of a sampled function, n < truncation."""
    if truncation > grid.n_theta // 2:
        raise ValueError("grid angular resolution below truncation")
    fhat = np.fft.fft(values, axis=1)[:, :truncation]   # sum_j f e^{-in theta_j}
    rad = radial_basis_matrix(truncation, grid.r)       # real
    w = grid.wr * grid.r * (2.0 * np.pi / grid.n_theta)
    return np.einsum("ni,i,in->n", rad, w, fhat)


def grid_l2_norm(values: np.ndarray, grid: PolarGrid) -> float:
    return float(np.sqrt(np.sum(np.abs(values) ** 2 * grid.area_weights)))


def grid_lp_norm(values: np.ndarray, grid: PolarGrid, p: float) -> float:
    if np.isinf(p):
        return float(np.max(np.abs(values)))
    return float(np.sum(np.abs(values) ** p * grid.area_weights) ** (1.0 / p))
