"""Independent oracles used by the tests.

These deliberately avoid the code paths they check: the displacement matrix
is a dense closed form (associated Laguerre polynomials) standing in for the
series-based translation, and the radial integrals use scipy.integrate.quad
on the raw integrand instead of the package's log-scaled tables.
"""

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_genlaguerre, gammaln

from lllsim.fock import WeightSpec


def displacement_matrix(alpha: complex, truncation: int) -> np.ndarray:
    """Dense matrix of the magnetic translation R_alpha in the phi_n basis.

    R_alpha acts on coefficients as the quantum displacement operator with
    parameter beta = -conj(alpha):
        D_mn = sqrt(n!/m!) beta^(m-n) e^{-|beta|^2/2} L_n^{(m-n)}(|beta|^2)
    for m >= n, and the adjoint-symmetric expression otherwise.
    """
    beta = -np.conj(alpha)
    D = np.zeros((truncation, truncation), dtype=np.complex128)
    ab2 = abs(beta) ** 2
    for m in range(truncation):
        for n in range(truncation):
            if m >= n:
                pref = np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)) - ab2 / 2.0)
                D[m, n] = pref * beta ** (m - n) * eval_genlaguerre(n, m - n, ab2)
            else:
                pref = np.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)) - ab2 / 2.0)
                D[m, n] = pref * (-np.conj(beta)) ** (n - m) * eval_genlaguerre(m, n - m, ab2)
    return D


def radial_weight_integral(spec: WeightSpec, n: int) -> float:
    """I_n = (2/n!) int_0^inf w(r) r^(2n+1) e^{-r^2} dr by direct quadrature."""

    def integrand(r: float) -> float:
        return float(np.exp(spec.log_weight(np.array(r)))) * r ** (2 * n + 1) * np.exp(-r * r)

    val, _ = quad(integrand, 0.0, np.sqrt(2 * n + 1) + 14.0, epsabs=1e-14, epsrel=1e-12, limit=300)
    return 2.0 * val / float(np.exp(gammaln(n + 1)))
