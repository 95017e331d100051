"""Lamb-Oseen vortex evaluators and the associated torque remainder.

The vortex is the azimuthal field

    Theta(t, x) = (1/2pi) (x_perp/|x|^2) (1 - exp(-|x|^2 / 4(1+t))),

equivalently Theta = g(t, |x|^2) x_perp with
g(t, r) = (1 - exp(-r/4(1+t))) / (2 pi r).  Time always enters through
1 + t.  The disk sees a pure rotation with rate g(t, 1), so substituting
alpha*Theta into the coupled system leaves a remainder only in the
angular momentum law; that remainder is zeta(t) below.

Surface-stress reduction used by ``zeta``: the pressure acts normally,
so it exerts no torque on the unit circle; for an azimuthal field with
profile f(r) the viscous traction there is azimuthal with density
(f'(1) - f(1)) per unit length (with the fluid-outward normal -e_r this
enters torque integrals as -(f'(1) - f(1)) against x_perp).  Hence

    int x_perp . Sigma(Theta, Pi) n dsigma = -2 pi (f'(1) - f(1)),

with f(r) = g(t, r^2) r, and no quadrature is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar


class OseenDomainError(ValueError):
    """Raised for arguments outside an evaluator's stated domain."""


def g_profile(t, r):
    """Radial profile g(t, r); r is the squared-radius argument.

    Returns (1 - exp(-r/4(1+t))) / (2 pi r), with the removable limit
    1 / (8 pi (1+t)) at r = 0.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise OseenDomainError("g_profile requires r >= 0")
    u = r / (4.0 * (1.0 + t))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(
            r > 0.0,
            -np.expm1(-u) / (2.0 * np.pi * np.where(r > 0.0, r, 1.0)),
            1.0 / (8.0 * np.pi * (1.0 + t)),
        )
    if out.ndim == 0:
        return float(out)
    return out


def g_profile_dt(t, r):
    """d/dt of g(t, r): -exp(-r/4(1+t)) / (8 pi (1+t)^2), exact."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    big_t = 1.0 + t
    out = -np.exp(-r / (4.0 * big_t)) / (8.0 * np.pi * big_t * big_t)
    if out.ndim == 0:
        return float(out)
    return out


def theta(t, x, alpha=1.0):
    """alpha * Theta(t, x) for a 2-vector x; (0,0) at the center."""
    x = np.asarray(x, dtype=float)
    r2 = x[0] * x[0] + x[1] * x[1]
    if r2 == 0.0:
        return np.zeros(2)
    mag = alpha * g_profile(t, r2)
    return mag * np.array([-x[1], x[0]])


def theta_profile(t, r):
    """|Theta(t, x)| at |x| = r, i.e. f(r) = g(t, r^2) r (alpha = 1)."""
    r = np.asarray(r, dtype=float)
    return g_profile(t, r * r) * r


def theta_profile_dr(t, r):
    """d/dr of the azimuthal speed profile f(r) = g(t, r^2) r."""
    r = np.asarray(r, dtype=float)
    big_t = 1.0 + float(t)
    e = np.exp(-r * r / (4.0 * big_t))
    one_minus_e = -np.expm1(-r * r / (4.0 * big_t))
    return (e * r * r / (2.0 * big_t) - one_minus_e) / (2.0 * np.pi * r * r)


def pressure_gradient(t, x, alpha=1.0):
    """grad Pi = alpha^2 (x/|x|^2) |Theta(t,x)|^2; singular at x = 0."""
    x = np.asarray(x, dtype=float)
    r2 = x[0] * x[0] + x[1] * x[1]
    if r2 == 0.0:
        raise OseenDomainError("pressure gradient is singular at the origin")
    th = theta(t, x, 1.0)
    mag2 = th[0] * th[0] + th[1] * th[1]
    return alpha * alpha * mag2 / r2 * x


@dataclass(frozen=True)
class RigidBodyParams:
    """Mass and moment of inertia of the unit disk (positive reals)."""

    mass: float = np.pi
    inertia: float = np.pi / 2.0

    def __post_init__(self):
        if self.mass <= 0.0 or self.inertia <= 0.0:
            raise ValueError("mass and inertia must be positive")

    @classmethod
    def homogeneous(cls, density=1.0):
        m = density * np.pi
        return cls(mass=m, inertia=m / 2.0)


@dataclass(frozen=True)
class ZetaEval:
    """Decomposition of the torque remainder at one time."""

    time: float
    torque_residual: float
    stress_part: float
    inertia_part: float


def zeta(t, body: RigidBodyParams = RigidBodyParams()) -> ZetaEval:
    """Torque remainder zeta(t) of the vortex ansatz, in closed form.

    zeta = -int_{dB0} x_perp . Sigma(Theta, Pi) n dsigma - J d/dt g(t,1).
    Written with u = 1/(4(1+t)) the stress integral is
    -2(u e^{-u} + expm1(-u)), a form stable against cancellation.
    """
    t = float(t)
    if t < 0.0:
        raise OseenDomainError("zeta requires t >= 0")
    big_t = 1.0 + t
    u = 1.0 / (4.0 * big_t)
    # int x_perp . Sigma n = -2 pi (f'(1) - f(1)) = -2(u e^{-u} + expm1(-u))
    stress = -2.0 * (u * np.exp(-u) + np.expm1(-u))
    inertia = body.inertia * g_profile_dt(t, 1.0)
    return ZetaEval(
        time=t,
        torque_residual=-stress - inertia,
        stress_part=stress,
        inertia_part=inertia,
    )


def surface_stress_quadrature(t, n_theta=256):
    """Net force and torque of Sigma(Theta, Pi) n over the unit circle.

    Trapezoidal quadrature cross-check of the closed forms used by
    ``zeta``; the pressure on the circle is the constant Pi(1) and is
    integrated explicitly rather than dropped.
    """
    th = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    ct, st = np.cos(th), np.sin(th)
    f1 = float(theta_profile(t, np.array(1.0)))
    fp1 = float(theta_profile_dr(t, np.array(1.0)))
    # Pi(1): radial integral of |Theta|^2 / r from the center
    pi1, _ = quad(lambda r: theta_profile(t, np.array(r)) ** 2 / r, 0.0, 1.0)
    traction_theta = -(fp1 - f1)  # azimuthal viscous traction, n = -e_r
    traction_r = pi1  # -Pi * n = -Pi * (-e_r)
    tx = traction_r * ct + traction_theta * -st
    ty = traction_r * st + traction_theta * ct
    dsig = 2.0 * np.pi / n_theta
    force = np.array([tx.sum(), ty.sum()]) * dsig
    torque = np.sum(-st * tx + ct * ty) * dsig
    return force, torque


_TAIL_WIDTH = 480.0  # r_tail^2 / 4(1+t); exp(-120) below double noise


def theta_lp_norm(t, p):
    """||Theta(t)||_{L^p(R^2)} by radial quadrature with analytic tail."""
    if p <= 2.0:
        raise OseenDomainError("||Theta||_p requires p > 2")
    big_t = 1.0 + float(t)
    if np.isinf(p):
        res = minimize_scalar(
            lambda r: -theta_profile(t, np.array(r)),
            bounds=(1e-6, 10.0 * np.sqrt(big_t)),
            method="bounded",
        )
        return float(-res.fun)
    r_tail = np.sqrt(_TAIL_WIDTH * big_t)
    body, _ = quad(
        lambda r: theta_profile(t, np.array(r)) ** p * 2.0 * np.pi * r,
        0.0,
        r_tail,
        epsabs=0.0,
        epsrel=1e-10,
        limit=400,
    )
    tail = (2.0 * np.pi) ** (1.0 - p) * r_tail ** (2.0 - p) / (p - 2.0)
    return (body + tail) ** (1.0 / p)


def grad_theta_lp_norm(t, p):
    """||grad Theta(t)||_{L^p(R^2)}; for the azimuthal profile f this is
    the L^p norm of sqrt(f'^2 + (f/r)^2)."""
    if p <= 1.0:
        raise OseenDomainError("||grad Theta||_p requires p > 1")
    big_t = 1.0 + float(t)

    def mag(r):
        fp = theta_profile_dr(t, np.array(r))
        fr = g_profile(t, r * r)
        return np.sqrt(fp * fp + fr * fr)

    if np.isinf(p):
        res = minimize_scalar(
            lambda r: -mag(r), bounds=(1e-6, 10.0 * np.sqrt(big_t)), method="bounded"
        )
        return float(-res.fun)
    r_tail = np.sqrt(_TAIL_WIDTH * big_t)
    body, _ = quad(
        lambda r: mag(r) ** p * 2.0 * np.pi * r,
        0.0,
        r_tail,
        epsabs=0.0,
        epsrel=1e-10,
        limit=400,
    )
    # f ~ 1/(2 pi r) far out: |grad Theta| ~ sqrt(2)/(2 pi r^2)
    tail = (
        2.0
        * np.pi
        * (np.sqrt(2.0) / (2.0 * np.pi)) ** p
        * r_tail ** (2.0 - 2.0 * p)
        / (2.0 * p - 2.0)
    )
    return (body + tail) ** (1.0 / p)


def theta_diff_l2_sq(t, s):
    """||Theta(t) - Theta(s)||_{L^2(R^2)}^2 by radial quadrature."""
    ta, tb = 1.0 + float(t), 1.0 + float(s)
    r_tail = np.sqrt(_TAIL_WIDTH * max(ta, tb))

    def integrand(r):
        d = np.exp(-r * r / (4.0 * tb)) - np.exp(-r * r / (4.0 * ta))
        return (d / (2.0 * np.pi * r)) ** 2 * 2.0 * np.pi * r

    val, _ = quad(integrand, 0.0, r_tail, epsabs=1e-15, epsrel=1e-10, limit=400)
    return val


def theta_diff_l2_sq_closed(t, s):
    """Exact value of the previous integral: (1/4pi) log((a+b)^2/4ab)
    with a = 1/(1+s), b = 1/(1+t)."""
    a, b = 1.0 / (1.0 + float(s)), 1.0 / (1.0 + float(t))
    return np.log((a + b) ** 2 / (4.0 * a * b)) / (4.0 * np.pi)


def grad_theta_diff_l2_sq(t, s):
    """||grad Theta(t) - grad Theta(s)||_{L^2(R^2)}^2 by radial quadrature."""
    ta, tb = 1.0 + float(t), 1.0 + float(s)
    r_tail = np.sqrt(_TAIL_WIDTH * max(ta, tb))

    def integrand(r):
        dfp = theta_profile_dr(t, np.array(r)) - theta_profile_dr(s, np.array(r))
        dfr = g_profile(t, r * r) - g_profile(s, r * r)
        return (dfp * dfp + dfr * dfr) * 2.0 * np.pi * r

    val, _ = quad(integrand, 1e-12, r_tail, epsabs=1e-15, epsrel=1e-10, limit=400)
    return val


def theta_norm_bounds(t, s, p):
    """All four norm estimates for Theta at (t, s, p), with their bounds.

    Returns a dict mapping item name to (computed, bound).  The fitted
    constants a_p, b_p, kappa_1 are the computed/(decay factor) ratios;
    item 3's bound is the exact (1/4pi)|log((1+t)/(1+s))|.
    """
    if not np.isinf(p) and p <= 2.0:
        raise OseenDomainError("lemma item 1 requires p in (2, inf]")
    if t < 0.0 or s < 0.0:
        raise OseenDomainError("times must be nonnegative")
    big_t, big_s = 1.0 + t, 1.0 + s
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    n1 = theta_lp_norm(t, p)
    n2 = grad_theta_lp_norm(t, p)
    d3 = theta_diff_l2_sq(t, s)
    d4 = grad_theta_diff_l2_sq(t, s)
    return {
        "theta_lp": (n1, big_t ** -(0.5 - inv_p)),
        "grad_theta_lp": (n2, big_t ** -(1.0 - inv_p)),
        "theta_diff_l2_sq": (d3, abs(np.log(big_t / big_s)) / (4.0 * np.pi)),
        "grad_theta_diff_l2_sq": (d4, abs(1.0 / big_t - 1.0 / big_s)),
    }
