"""Initial-data corpus for decay and stability runs.

Divergence-free fields are built from per-mode stream profiles
(v_r, v_theta) = ((ik/r) psi, -psi') and then projected, which enforces
the discrete constraint exactly.

The L^q-sharp data used by the decay suites carries an r^{-3/2}-type
tail (borderline for q = 4/3): inside the trust window the truncated
tail behaves like the genuine infinite one, and it is what saturates the
semigroup rates; compactly supported data would decay at the faster
q -> 1 rates instead.
"""

from __future__ import annotations

import numpy as np

from .assembly import OperatorAssembly
from .state import FlowState, empty_state, impose_rigid_trace


def _outer_taper(r, r_max, frac=0.08):
    """Smooth cutoff to zero over the last ``frac`` of the annulus."""
    s = np.clip((r_max - r) / (frac * (r_max - 1.0)), 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def sharp_lq_dipole(
    asm: OperatorAssembly,
    q: float = 4.0 / 3.0,
    amplitude: float = 1.0,
    omega0: float = 0.0,
    core: float = 2.0,
) -> FlowState:
    """Mode-1 field with an |x|^{-2/q} velocity tail, rigid-compatible.

    The stream profile is psi(r) ~ r^{1-2/q} going out (so |v| ~ r^{-2/q},
    exactly borderline for L^q), mollified at the disk and tapered at R.
    Boundary values pin ell through psi(1) = psi'(1) = -i ell_c / 2.
    """
    grid = asm.grid
    r = asm.mesh.r
    tail_exp = 1.0 - 2.0 / q
    ramp = 1.0 - np.exp(-((r - 1.0) / core) ** 2)
    psi = amplitude * (ramp * r**tail_exp + np.exp(-((r - 1.0) / core) ** 2))
    psi *= _outer_taper(r, grid.outer_radius)
    dpsi = np.gradient(psi, r)

    st = empty_state(grid, asm.body)
    st.modes[1, 0] = 1j * psi / r
    st.modes[1, 1] = -dpsi
    # rigid data from the trace relations at r = 1
    ell_c = 2j * psi[0]
    st.ell = np.array([ell_c.real, -ell_c.imag])
    st.omega = omega0
    if omega0 != 0.0:
        st.modes[0, 1] = omega0 * np.exp(-((r - 1.0) / 1.5) ** 2) * _outer_taper(
            r, grid.outer_radius
        )
    impose_rigid_trace(st)
    return asm.apply_projector(st)


def sharp_lq_swirl(
    asm: OperatorAssembly,
    q: float = 4.0 / 3.0,
    amplitude: float = 1.0,
    core: float = 0.8,
) -> FlowState:
    """Azimuthal (mode-0) field with the |x|^{-2/q} tail and no body data.

    Pure swirl keeps ell = 0 exactly, so its p-norm decay probes the
    semigroup rates free of the translation coupling; the small core
    keeps the effective time offset of the window fit low.
    """
    grid = asm.grid
    r = asm.mesh.r
    ramp = 1.0 - np.exp(-((r - 1.0) / core) ** 2)
    w = amplitude * ramp * r ** (-2.0 / q)
    w *= _outer_taper(r, grid.outer_radius)
    st = empty_state(grid, asm.body)
    st.modes[0, 1] = w
    impose_rigid_trace(st)
    return asm.apply_projector(st)


def localized_ring(
    asm: OperatorAssembly,
    amplitude: float = 1.0,
    center: float = 4.0,
    width: float = 1.5,
    omega0: float = 0.0,
) -> FlowState:
    """Compactly supported mode-1 perturbation (plus optional rotation)."""
    grid = asm.grid
    r = asm.mesh.r
    psi = amplitude * np.exp(-(((r - center) / width) ** 2))
    psi *= _outer_taper(r, grid.outer_radius)
    dpsi = np.gradient(psi, r)
    st = empty_state(grid, asm.body)
    st.modes[1, 0] = 1j * psi / r
    st.modes[1, 1] = -dpsi
    ell_c = 2j * psi[0]
    st.ell = np.array([ell_c.real, -ell_c.imag])
    st.omega = omega0
    if omega0 != 0.0:
        st.modes[0, 1] = omega0 * np.exp(-((r - 1.0) / 1.5) ** 2) * _outer_taper(
            r, grid.outer_radius
        )
    impose_rigid_trace(st)
    return asm.apply_projector(st)


def bump_tensor_modes(asm: OperatorAssembly, center=8.0, width=2.5, mode: int = 0):
    """Polar-frame tensor field F supported inside the annulus, carrying
    one angular mode; for duality-decay sources V0 = P div F.

    Returns F-hat with shape (K+1, 2, 2, n_quad) (zero except ``mode``).
    """
    mesh = asm.mesh
    kmax = asm.grid.fourier_modes
    f_hat = np.zeros((kmax + 1, 2, 2, mesh.n_quad), dtype=complex)
    bump = np.exp(-(((mesh.rq - center) / width) ** 2))
    bump[np.abs(mesh.rq - center) > 4.0 * width] = 0.0
    f_hat[mode, 0, 1] = bump
    f_hat[mode, 1, 0] = -0.5 * bump
    return f_hat


def p_div(asm: OperatorAssembly, f_hat) -> FlowState:
    """P div F from the weak form <P div F, phi> = -int F : grad phi."""
    rhs = []
    for blk in asm.blocks:
        w = blk.s_k * asm.mesh.wq * asm.mesh.rq
        acc = np.zeros(2 * asm.mesh.n_nodes, dtype=complex)
        ops = ((0, 0), (0, 1), (1, 0), (1, 1))
        for i, (c, d) in enumerate(ops):
            L = blk.grad[2 * c + d]
            acc -= L.conj().T @ (w * f_hat[blk.k, c, d])
        rhs.append(blk.E.conj().T @ acc)
    return asm.dofs_to_state(asm.project_dofs(rhs))


def random_solenoidal(asm: OperatorAssembly, seed: int, amplitude=1.0) -> FlowState:
    """Smooth random divergence-free state (seeded), for property tests."""
    rng = np.random.default_rng(seed)
    grid = asm.grid
    r = asm.mesh.r
    st = empty_state(grid, asm.body)
    for k in range(min(grid.fourier_modes, 5) + 1):
        n_b = rng.integers(1, 4)
        psi = np.zeros_like(r, dtype=complex)
        for _ in range(n_b):
            c = rng.uniform(2.0, 0.7 * grid.outer_radius)
            wdt = rng.uniform(0.8, 3.0)
            amp = amplitude * (rng.normal() + (1j * rng.normal() if k else 0.0))
            psi += amp * np.exp(-(((r - c) / wdt) ** 2))
        psi *= _outer_taper(r, grid.outer_radius)
        if k == 0:
            st.modes[0, 1] = np.real(-np.gradient(psi, r))
        else:
            st.modes[k, 0] = 1j * k * psi / r
            st.modes[k, 1] = -np.gradient(psi, r)
    st.ell = 0.3 * amplitude * rng.standard_normal(2)
    st.omega = 0.3 * amplitude * float(rng.standard_normal())
    impose_rigid_trace(st)
    return asm.apply_projector(st)
