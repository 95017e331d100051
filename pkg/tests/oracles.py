"""Independent numerical oracles used by the test suite only.

The Bessel oracle integrates the representations

    K0(x) = int_0^inf exp(-x cosh t) dt
    K1(x) = int_0^inf cosh(t) exp(-x cosh t) dt

with adaptive quadrature.  K0' comes from -K1 (integral form), K1' from
differentiating under the integral.  None of this shares code with the
library evaluators.
"""

import csv

import numpy as np
from scipy.integrate import quad


def _upper_cutoff(x):
    # beyond x*cosh(t) ~ 745 the integrand underflows
    return float(np.arccosh(745.0 / x)) + 1.0 if x < 700.0 else 1.0


def bessel_k_quadrature(order, x):
    """K_order(x) by adaptive quadrature of the cosh integral."""
    x = float(x)
    t_hi = _upper_cutoff(x)
    if order == 0:
        f = lambda t: np.exp(-x * np.cosh(t))
    else:
        f = lambda t: np.cosh(t) * np.exp(-x * np.cosh(t))
    val, _ = quad(f, 0.0, t_hi, epsabs=0.0, epsrel=1e-13, limit=400)
    return val


def bessel_kp_quadrature(order, x):
    """K_order'(x) by differentiation under the integral sign."""
    x = float(x)
    t_hi = _upper_cutoff(x)
    if order == 0:
        f = lambda t: -np.cosh(t) * np.exp(-x * np.cosh(t))
    else:
        f = lambda t: -np.cosh(t) ** 2 * np.exp(-x * np.cosh(t))
    val, _ = quad(f, 0.0, t_hi, epsabs=0.0, epsrel=1e-13, limit=400)
    return val


def write_bessel_table(path, xs):
    """Dump (x, K0, K1, K0', K1') oracle rows for cross-language pinning."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "K0", "K1", "K0p", "K1p"])
        for x in xs:
            w.writerow([
                f"{x:.17e}",
                f"{bessel_k_quadrature(0, x):.17e}",
                f"{bessel_k_quadrature(1, x):.17e}",
                f"{bessel_kp_quadrature(0, x):.17e}",
                f"{bessel_kp_quadrature(1, x):.17e}",
            ])


def gamma_highprec(y):
    """log Gamma at 50 digits via mpmath; oracle for the in-module lgamma."""
    import mpmath as mp

    with mp.workdps(50):
        return float(mp.loggamma(mp.mpf(y)))


def gn_constant_highprec(q, d=2):
    """Del Pino-Dolbeault constant evaluated in 50-digit arithmetic."""
    import mpmath as mp

    with mp.workdps(50):
        q = mp.mpf(q)
        d = mp.mpf(d)
        theta = d * (q - 1) / (q * (d + 2 - (d - 2) * q))
        y = (q + 1) / (q - 1)
        val = (
            (y * (q - 1) ** 2 / (2 * mp.pi * d)) ** (theta / 2)
            * ((2 * y - d) / (2 * y)) ** (1 / (2 * q))
            * (mp.gamma(y) / mp.gamma(y - d / 2)) ** (theta / d)
        )
        return float(val)
