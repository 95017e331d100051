"""Modified Bessel functions K0, K1 and their first derivatives on (0, inf).

Three evaluation regimes, chosen so each converges to near machine
precision with double arithmetic:

* ``x <= 2``  -- ascending power series with the log term,
* ``2 < x <= 16`` -- frozen Chebyshev fits of sqrt(x) e^x K_nu(x)
  (see ``tools/gen_bessel_cheb.py``),
* ``x > 16``  -- large-argument expansion sqrt(pi/2x) e^{-x} P_nu(1/x),
  truncated at the smallest term.

Derivatives are produced by differentiating each representation term by
term, never through the recurrences K0' = -K1 / K1' = -K0 - K1/x, so
those identities remain usable as independent consistency checks.

Beyond ``x = 700`` the unscaled value would underflow; evaluations there
return ``e^x K_nu(x)`` with ``scaled=True``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._bessel_cheb import BAND_HI, BAND_LO, CHEB_G0, CHEB_G1

EULER_GAMMA = 0.5772156649015328606

# unscaled e^{-x} underflows usefully past here (double exponent range)
SCALE_THRESHOLD = 700.0

_SERIES_TERMS = 32
_ASYMP_TERMS = 40


class BesselDomainError(ValueError):
    """Raised for arguments outside (0, inf) or outside a stated regime."""


@dataclass(frozen=True)
class BesselEval:
    """One evaluation of K_nu: value and first derivative at ``argument``.

    When ``scaled`` is set, ``value`` and ``derivative`` carry an extra
    factor e^{argument}.
    """

    order: int
    argument: float
    value: float
    derivative: float
    scaled: bool = False


def _series_k(x):
    """Ascending series for K0, K1, K0', K1' (vectorized, x <= 2).

    K0 = -(log(x/2) + gamma) I0 + sum_{k>=1} H_k u^k/(k!)^2,
    K1 = 1/x + log(x/2) I1 - (x/4) sum_{k>=0} (psi(k+1)+psi(k+2)) u^k/(k!(k+1)!),
    with u = x^2/4.  Derivatives are term-wise.
    """
    x = np.asarray(x, dtype=float)
    u = x * x / 4.0
    lg = np.log(x / 2.0)

    i0 = np.ones_like(x)
    i0p = np.zeros_like(x)
    s0 = np.zeros_like(x)
    s0p = np.zeros_like(x)
    sig = np.ones_like(x)           # sum_k u^k/(k!(k+1)!)
    sigk = np.zeros_like(x)         # sum_k k u^k/(k!(k+1)!)
    t1 = np.zeros_like(x)
    t1p = np.zeros_like(x)

    term_i0 = np.ones_like(x)
    term_t = np.ones_like(x)
    hk = 0.0
    psi_sum = -2.0 * EULER_GAMMA + 1.0  # psi(1) + psi(2)
    t1 = t1 + psi_sum * term_t
    for k in range(1, _SERIES_TERMS):
        term_i0 = term_i0 * u / (k * k)
        hk += 1.0 / k
        i0 += term_i0
        i0p += term_i0 * (2.0 * k / x)
        s0 += hk * term_i0
        s0p += hk * term_i0 * (2.0 * k / x)

        term_t = term_t * u / (k * (k + 1))
        psi_sum += 1.0 / k + 1.0 / (k + 1)
        sig += term_t
        sigk += k * term_t
        t1 += psi_sum * term_t
        t1p += psi_sum * term_t * (2.0 * k / x)

    k0 = -(lg + EULER_GAMMA) * i0 + s0
    k0p = -i0 / x - (lg + EULER_GAMMA) * i0p + s0p
    i1 = 0.5 * x * sig
    i1p = 0.5 * sig + sigk          # = d/dx[(x/2) sum] with term-wise d/dx
    k1 = 1.0 / x + lg * i1 - (x / 4.0) * t1
    k1p = (
        -1.0 / (x * x)
        + i1 / x
        + lg * i1p
        - 0.25 * t1
        - (x / 4.0) * t1p
    )
    return k0, k1, k0p, k1p


def _clenshaw(coeffs, t):
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for c in coeffs[:0:-1]:
        b1, b2 = 2.0 * t * b1 - b2 + c, b1
    return t * b1 - b2 + coeffs[0]


def _cheb_deriv_coeffs(coeffs):
    n = len(coeffs)
    out = np.zeros(n)
    if n > 1:
        out[n - 2] = 2.0 * (n - 1) * coeffs[n - 1]
        for j in range(n - 3, -1, -1):
            out[j] = out[j + 2] + 2.0 * (j + 1) * coeffs[j + 1]
    out[0] *= 0.5
    return out


_CHEB_DG0 = _cheb_deriv_coeffs(CHEB_G0) * (2.0 / (BAND_HI - BAND_LO))
_CHEB_DG1 = _cheb_deriv_coeffs(CHEB_G1) * (2.0 / (BAND_HI - BAND_LO))


def _cheb_k(order, x):
    """Chebyshev band: returns scaled values e^x K, e^x K' (vectorized)."""
    x = np.asarray(x, dtype=float)
    t = (2.0 * x - (BAND_HI + BAND_LO)) / (BAND_HI - BAND_LO)
    cg = CHEB_G0 if order == 0 else CHEB_G1
    dg = _CHEB_DG0 if order == 0 else _CHEB_DG1
    g = _clenshaw(cg, t)
    gp = _clenshaw(dg, t)
    rx = 1.0 / np.sqrt(x)
    k_s = g * rx
    kp_s = (gp - g - g / (2.0 * x)) * rx
    return k_s, kp_s


def _asymp_k(order, x):
    """Large-argument expansion: returns e^x K, e^x K' (vectorized, x > 16)."""
    x = np.asarray(x, dtype=float)
    mu = 4.0 * order * order
    p = np.ones_like(x)
    dp = np.zeros_like(x)          # P'(z) evaluated at z = 1/x, times 1
    term = np.ones_like(x)
    z = 1.0 / x
    done = np.zeros_like(x, dtype=bool)
    for k in range(1, _ASYMP_TERMS):
        factor = (mu - (2.0 * k - 1.0) ** 2) / (8.0 * k)
        new = term * factor * z
        grow = np.abs(new) >= np.abs(term)
        done |= grow
        new = np.where(done, 0.0, new)
        p += new
        dp += k * new / z
        term = new
        if done.all() or np.max(np.abs(new)) < 1e-18:
            break
    pref = np.sqrt(np.pi / (2.0 * x))
    k_s = pref * p
    kp_s = -pref * (p * (1.0 + 1.0 / (2.0 * x)) + dp * z * z)
    return k_s, kp_s


def k_scaled(order, x):
    """Vectorized e^x K_nu(x) and e^x K_nu'(x) for x > 0.

    This is the workhorse used by the resolvent profiles, where ratios of
    K values at large arguments must not underflow.
    """
    if order not in (0, 1):
        raise BesselDomainError(f"order must be 0 or 1, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
        raise BesselDomainError("argument must be positive and finite")
    k_s = np.empty_like(x)
    kp_s = np.empty_like(x)

    lo = x <= BAND_LO
    mid = (x > BAND_LO) & (x <= BAND_HI)
    hi = x > BAND_HI
    if lo.any():
        k0, k1, k0p, k1p = _series_k(x[lo])
        e = np.exp(x[lo])
        if order == 0:
            k_s[lo], kp_s[lo] = k0 * e, k0p * e
        else:
            k_s[lo], kp_s[lo] = k1 * e, k1p * e
    if mid.any():
        k_s[mid], kp_s[mid] = _cheb_k(order, x[mid])
    if hi.any():
        k_s[hi], kp_s[hi] = _asymp_k(order, x[hi])
    return k_s, kp_s


def k_value(order, x):
    """Vectorized unscaled K_nu(x), K_nu'(x); underflows to 0 past ~740."""
    k_s, kp_s = k_scaled(order, x)
    e = np.exp(-np.asarray(x, dtype=float))
    return k_s * e, kp_s * e


def eval_k(order: int, x: float) -> BesselEval:
    """Evaluate K_order at a single point x > 0.

    For ``x > 700`` the result is returned in scaled form (value * e^x,
    flagged); otherwise value and derivative are plain.
    """
    if order not in (0, 1):
        raise BesselDomainError(f"order must be 0 or 1, got {order}")
    x = float(x)
    if not (x > 0.0) or not np.isfinite(x):
        raise BesselDomainError(f"argument must be a positive finite real, got {x}")
    k_s, kp_s = k_scaled(order, np.array([x]))
    if x > SCALE_THRESHOLD:
        return BesselEval(order, x, float(k_s[0]), float(kp_s[0]), scaled=True)
    e = np.exp(-x)
    return BesselEval(order, x, float(k_s[0] * e), float(kp_s[0] * e), scaled=False)


def asymptotic_ratio(order: int, x: float) -> float:
    """K_nu(x) divided by its leading asymptotic form sqrt(pi/2x) e^{-x}.

    Only meaningful in the asymptotic regime; tends to 1 as x -> inf.
    """
    x = float(x)
    if x < 5.0:
        raise BesselDomainError("asymptotic_ratio requires x >= 5")
    k_s, _ = k_scaled(order, np.array([x]))
    return float(k_s[0] / np.sqrt(np.pi / (2.0 * x)))


def ode_residual(order: int, x: float, h_rel: float = 1e-4) -> float:
    """Relative residual of the defining ODE using 5-point FD second derivatives.

    K0 solves  -(1/r)(r K0')' + K0 = 0;
    K1 solves  -(1/r)(r K1')' + (1 + 1/r^2) K1 = 0.
    """
    h = h_rel * x
    pts = x + h * np.arange(-2.0, 3.0)
    v, _ = k_value(order, pts)
    d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h)
    d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h)
    pot = 1.0 if order == 0 else 1.0 + 1.0 / (x * x)
    res = -(d2 + d1 / x) + pot * v[2]
    scale = max(abs(d2), abs(d1 / x), abs(pot * v[2]))
    return abs(res) / scale
