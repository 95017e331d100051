"""Truncated polar grid for the exterior domain.

The fluid annulus 1 <= r <= R is meshed with N_r radial nodes (optionally
clustered near the disk) and resolved in theta by Fourier modes
k = 0..K.  The artificial outer boundary carries homogeneous Dirichlet
conditions; simulations are trusted only up to T = R^2/16, before
diffusion from the disk reaches it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# 4-point Gauss-Legendre on [-1, 1]
_GAUSS_X = np.array([
    -0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526,
])
_GAUSS_W = np.array([
    0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538,
])


class GridConfigError(ValueError):
    """Raised for grids too coarse or otherwise malformed."""


def fd_weights(nodes, x0, order):
    """Finite-difference weights at x0 for the given derivative order
    (Fornberg's algorithm)."""
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    w = np.zeros((order + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = nodes[0] - x0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = ((nodes[i] - x0) * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = (nodes[i] - x0) * w[0, j] / c3
        c1 = c2
    return w[order]


@dataclass(frozen=True)
class GridConfig:
    """Polar discretization parameters.

    ``fourier_modes`` is the largest retained azimuthal index K (modes
    -K..K via conjugate symmetry).  ``stretching`` picks the radial map:
    "exp" clusters nodes at the disk, "uniform" does not.
    """

    outer_radius: float = 40.0
    radial_points: int = 64
    fourier_modes: int = 16
    stretching: str = "exp"
    stretch_beta: float = 2.5

    def __post_init__(self):
        if self.outer_radius <= 1.0:
            raise GridConfigError("outer radius must exceed the disk radius 1")
        if self.radial_points < 8:
            raise GridConfigError("need at least 8 radial points for the stencils")
        if self.fourier_modes < 0:
            raise GridConfigError("fourier_modes must be nonnegative")
        if self.stretching not in ("exp", "uniform"):
            raise GridConfigError(f"unknown stretching {self.stretching!r}")

    @property
    def trust_horizon(self) -> float:
        """Largest time before outer-boundary contamination: R^2/16."""
        return self.outer_radius**2 / 16.0


class RadialMesh:
    """Nodes, elements and quadrature tables for one GridConfig."""

    def __init__(self, config: GridConfig):
        self.config = config
        n = config.radial_points
        s = np.linspace(0.0, 1.0, n)
        if config.stretching == "exp":
            b = config.stretch_beta
            frac = np.expm1(b * s) / np.expm1(b)
        else:
            frac = s
        self.r = 1.0 + (config.outer_radius - 1.0) * frac
        self.n_nodes = n
        self.n_elem = n - 1
        h = np.diff(self.r)
        # quadrature points per element
        mid = 0.5 * (self.r[:-1] + self.r[1:])
        self.rq = (mid[:, None] + 0.5 * h[:, None] * _GAUSS_X[None, :]).ravel()
        self.wq = (0.5 * h[:, None] * _GAUSS_W[None, :]).ravel()
        self.n_quad = self.rq.size
        # P1 basis values/derivatives at quadrature points: (n_quad, n_nodes)
        self.P = np.zeros((self.n_quad, n))
        self.Pd = np.zeros((self.n_quad, n))
        for e in range(self.n_elem):
            sl = slice(4 * e, 4 * e + 4)
            xi = (self.rq[sl] - self.r[e]) / h[e]
            self.P[sl, e] = 1.0 - xi
            self.P[sl, e + 1] = xi
            self.Pd[sl, e] = -1.0 / h[e]
            self.Pd[sl, e + 1] = 1.0 / h[e]
        # element membership of quad points, for P0 pressure tests
        self.elem_of_quad = np.repeat(np.arange(self.n_elem), 4)
        # one-sided 4th-order derivative weights at the disk boundary
        self.flux_weights = fd_weights(self.r[:5], self.r[0], 1)

    def fft_size(self) -> int:
        """Angular sample count: >= 3K+2 (dealiased products), even."""
        k = self.config.fourier_modes
        n = max(8, 3 * k + 2)
        return n + (n % 2)
