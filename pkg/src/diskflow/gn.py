"""Sharp Gagliardo-Nirenberg machinery.

Implements the Del Pino-Dolbeault constant

    A_{q,d} = (y (q-1)^2 / 2 pi d)^{theta/2}
              ((2y-d)/2y)^{1/2q} (Gamma(y)/Gamma(y-d/2))^{theta/d},

    theta = d(q-1) / (q(d+2-(d-2)q)),   y = (q+1)/(q-1),

its simplified d = 2 product form in p = 2q, the discrete ratio harness
for ||u||_p <= C sqrt(p) ||u||_2^{2/p} ||grad u||_2^{1-2/p}, and the
induced bound on the disk's translation velocity.

The empirical constant C is always reported, never asserted against a
number: only its existence is proved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class GnDomainError(ValueError):
    """Raised when (q, d) fall outside the constant's domain."""


class DegenerateFieldError(ValueError):
    """Raised when a ratio is requested for the zero field."""


# Lanczos coefficients, g = 7 truncation
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lgamma(x: float) -> float:
    """log Gamma(x) for x > 0 by the Lanczos approximation.

    Arguments below 0.5 are lifted with log Gamma(x) = log Gamma(x+1) - log x.
    """
    if x <= 0.0:
        raise GnDomainError("lgamma requires x > 0")
    shift = 0.0
    while x < 0.5:
        shift -= math.log(x)
        x += 1.0
    a = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        a += c / (x - 1.0 + i)
    t = x + _LANCZOS_G - 0.5
    return shift + 0.5 * math.log(2.0 * math.pi) + (x - 0.5) * math.log(t) - t + math.log(a)


@dataclass(frozen=True)
class GnConstant:
    q: float
    d: int
    theta: float
    y: float
    value: float
    product_form: float | None = None  # d = 2 only


def gn_constant_product(p: float) -> float:
    """The d = 2 constant written in p = 2q:
    ((p+2)(p-2)/16pi)^{1/4-1/2p} (4/(p+2))^{1/p} (4/(p-2))^{1/4-1/2p}."""
    if p <= 2.0:
        raise GnDomainError("product form requires p > 2")
    e1 = 0.25 - 0.5 / p
    return (
        ((p + 2.0) * (p - 2.0) / (16.0 * math.pi)) ** e1
        * (4.0 / (p + 2.0)) ** (1.0 / p)
        * (4.0 / (p - 2.0)) ** e1
    )


def gn_constant(q: float, d: int = 2) -> GnConstant:
    """A_{q,d} via the Gamma form; for d = 2 also the product form.

    The two d = 2 expressions are asserted to agree to 1e-12 relative.
    """
    if q <= 1.0:
        raise GnDomainError("gn_constant requires q > 1 (y undefined otherwise)")
    if d < 2:
        raise GnDomainError("gn_constant requires d >= 2")
    if d >= 3 and q > d / (d - 2.0):
        raise GnDomainError(f"for d = {d} the constant requires q <= d/(d-2)")
    theta = d * (q - 1.0) / (q * (d + 2.0 - (d - 2.0) * q))
    y = (q + 1.0) / (q - 1.0)
    log_a = (
        0.5 * theta * math.log(y * (q - 1.0) ** 2 / (2.0 * math.pi * d))
        + (1.0 / (2.0 * q)) * math.log((2.0 * y - d) / (2.0 * y))
        + (theta / d) * (lgamma(y) - lgamma(y - d / 2.0))
    )
    value = math.exp(log_a)
    product = None
    if d == 2:
        product = gn_constant_product(2.0 * q)
        if abs(value - product) > 1e-12 * product:
            raise AssertionError(
                f"Gamma form and product form disagree at q={q}: {value} vs {product}"
            )
    return GnConstant(q=q, d=d, theta=theta, y=y, value=value, product_form=product)


@dataclass(frozen=True)
class GridField2D:
    """Scalar field sampled on a uniform Cartesian grid with spacing h."""

    values: np.ndarray
    h: float

    def lp_norm(self, p: float) -> float:
        if np.isinf(p):
            return float(np.max(np.abs(self.values)))
        return float((np.sum(np.abs(self.values) ** p) * self.h**2) ** (1.0 / p))

    def grad_l2_norm(self) -> float:
        gy, gx = np.gradient(self.values, self.h)
        return float(np.sqrt(np.sum(gx * gx + gy * gy) * self.h**2))

    def rescaled(self, lam: float) -> "GridField2D":
        """Samples of u(lam x): same values on the grid with spacing h/lam."""
        return GridField2D(values=self.values, h=self.h / lam)


def gn_ratio(u: GridField2D, p: float) -> float:
    """rho(u, p) = ||u||_p / (sqrt(p) ||u||_2^{2/p} ||grad u||_2^{1-2/p})."""
    if p < 2.0:
        raise GnDomainError("the sqrt(p) inequality requires p >= 2")
    l2 = u.lp_norm(2.0)
    if l2 == 0.0:
        raise DegenerateFieldError("GN ratio undefined for the zero field")
    g2 = u.grad_l2_norm()
    if g2 == 0.0:
        raise DegenerateFieldError("GN ratio undefined for constant fields")
    return u.lp_norm(p) / (np.sqrt(p) * l2 ** (2.0 / p) * g2 ** (1.0 - 2.0 / p))


def check_gn_inequality(u: GridField2D, p: float, corpus=None):
    """Ratio report for one field, optionally with a corpus running max."""
    rho = gn_ratio(u, p)
    report = {"p": p, "rho": rho}
    if corpus is not None:
        report["corpus_max"] = max(gn_ratio(v, p) for v in corpus)
    return report


def random_h1_corpus(n_fields: int, seed: int, n_grid: int = 96, half_width: float = 6.0):
    """Seeded corpus of smooth localized fields (Gaussian bump mixtures)."""
    rng = np.random.default_rng(seed)
    ax = np.linspace(-half_width, half_width, n_grid)
    h = ax[1] - ax[0]
    xx, yy = np.meshgrid(ax, ax)
    out = []
    for _ in range(n_fields):
        n_bumps = rng.integers(1, 5)
        vals = np.zeros_like(xx)
        for _ in range(n_bumps):
            cx, cy = rng.uniform(-2.0, 2.0, size=2)
            w = rng.uniform(0.4, 1.8)
            amp = rng.normal()
            vals += amp * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * w * w))
        out.append(GridField2D(values=vals, h=float(h)))
    return out


def log_optimized_p(tau: float, s: float) -> float:
    """The exponent choice p = 2 + log(1 + tau + s) used in the energy proof."""
    return 2.0 + math.log(1.0 + tau + s)


def body_velocity_bound(state, p: float, constant: float = 1.0):
    """|ell_v| against C sqrt(p) ||V||_{L2}^{2/p} ||grad V||_{L2}^{1-2/p}.

    ``state`` is an fsop FlowState; both norms are the disk-weighted ones
    the estimate is stated in.  Returns the measured quantities and the
    ratio |ell| / (sqrt(p) product); C itself is the caller's to fit.
    """
    from . import fsop

    if p < 2.0:
        raise GnDomainError("body velocity bound requires p >= 2")
    ell = float(np.hypot(*state.ell))
    l2 = fsop.l2_norm(state)
    g2 = fsop.grad_l2_norm_r2(state)
    if l2 == 0.0 or g2 == 0.0:
        raise DegenerateFieldError("bound undefined for degenerate fields")
    product = np.sqrt(p) * l2 ** (2.0 / p) * g2 ** (1.0 - 2.0 / p)
    return {
        "ell": ell,
        "p": p,
        "product": product,
        "bound": constant * product,
        "ratio": ell / product,
    }
