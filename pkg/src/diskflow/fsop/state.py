"""Flow states on the truncated polar grid.

A state bundles the fluid velocity (complex Fourier profiles of the
polar components at the radial nodes), the disk translation velocity
ell, the rotation rate omega, and the time.  Real fields are stored as
modes k = 0..K with the convention

    v(r, theta) = Re c_0(r) + sum_{k>=1} 2 Re[c_k(r) e^{i k theta}],

so the translation trace lives in mode 1 through ell_c = ell_x - i ell_y
(v_r, v_theta)(1) = (ell_c/2, i ell_c/2), and the rotation in mode 0,
v_theta(1) = omega.

The weighted L2 norm carries the disk density m/pi; its rigid part is
the closed form m|ell|^2 + (m/2) omega^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .grid import GridConfig, RadialMesh

_MESH_CACHE: dict[GridConfig, RadialMesh] = {}


def mesh_for(config: GridConfig) -> RadialMesh:
    if config not in _MESH_CACHE:
        _MESH_CACHE[config] = RadialMesh(config)
    return _MESH_CACHE[config]


@dataclass
class FlowState:
    """Velocity unknown (fluid modes, ell, omega) at one time."""

    grid: GridConfig
    body: "RigidBodyParams"
    modes: np.ndarray  # complex, shape (K+1, 2, N): [mode, (r, theta) comp, node]
    ell: np.ndarray  # shape (2,)
    omega: float
    time: float = 0.0

    def copy(self) -> "FlowState":
        return replace(self, modes=self.modes.copy(), ell=self.ell.copy())

    @property
    def n_modes(self) -> int:
        return self.modes.shape[0]

    def ell_c(self) -> complex:
        return complex(self.ell[0], -self.ell[1])


def empty_state(grid: GridConfig, body, time=0.0) -> FlowState:
    n = grid.radial_points
    return FlowState(
        grid=grid,
        body=body,
        modes=np.zeros((grid.fourier_modes + 1, 2, n), dtype=complex),
        ell=np.zeros(2),
        omega=0.0,
        time=time,
    )


def impose_rigid_trace(state: FlowState) -> None:
    """Overwrite boundary nodal values with the rigid trace and outer zeros."""
    state.modes[:, :, 0] = 0.0
    state.modes[:, :, -1] = 0.0
    state.modes[0, 1, 0] = state.omega
    if state.n_modes > 1:
        ell_c = state.ell_c()
        state.modes[1, 0, 0] = 0.5 * ell_c
        state.modes[1, 1, 0] = 0.5j * ell_c


def trace_defect(state: FlowState) -> float:
    """Max mismatch between boundary nodal values and the rigid trace."""
    d = [abs(state.modes[0, 0, 0]), abs(state.modes[0, 1, 0] - state.omega)]
    if state.n_modes > 1:
        ell_c = state.ell_c()
        d.append(abs(state.modes[1, 0, 0] - 0.5 * ell_c))
        d.append(abs(state.modes[1, 1, 0] - 0.5j * ell_c))
        d.append(float(np.max(np.abs(state.modes[2:, :, 0]))) if state.n_modes > 2 else 0.0)
    return max(d)


def mode_weights(n_modes: int) -> np.ndarray:
    """Global quadratic-form weights: 2 pi for k = 0, 4 pi for k >= 1."""
    s = np.full(n_modes, 4.0 * np.pi)
    s[0] = 2.0 * np.pi
    return s


def to_physical(mode_profiles: np.ndarray, n_fft: int) -> np.ndarray:
    """Modes (K+1, ...) -> physical samples (..., n_fft) over theta."""
    k1 = mode_profiles.shape[0]
    spec = np.zeros((n_fft // 2 + 1,) + mode_profiles.shape[1:], dtype=complex)
    spec[:k1] = mode_profiles
    return np.fft.irfft(np.moveaxis(spec, 0, -1), n=n_fft, axis=-1) * n_fft


def to_modes(values: np.ndarray, n_modes: int) -> np.ndarray:
    """Physical samples (..., n_fft) -> modes (n_modes, ...)."""
    spec = np.fft.rfft(values, axis=-1) / values.shape[-1]
    return np.moveaxis(spec, -1, 0)[:n_modes]


def quad_values(state: FlowState, mesh: RadialMesh):
    """Polar components of the fluid field at (r_quad, theta) samples."""
    n_fft = mesh.fft_size()
    prof = np.einsum("qn,kcn->kcq", mesh.P, state.modes)
    return to_physical(prof, n_fft)  # (2, n_quad, n_fft) after moveaxis? see below


def gradient_quad_modes(state: FlowState, mesh: RadialMesh) -> np.ndarray:
    """Per-mode gradient entries at radial quadrature points.

    Returns array (K+1, 2, 2, n_quad) with [k, c, d, q] = (grad v)_{c,d}
    in the polar frame: rows c in (r, theta), columns d in (r, theta):
      (grad v)_{r,r} = u',          (grad v)_{r,theta} = (ik u - w)/r,
      (grad v)_{theta,r} = w',      (grad v)_{theta,theta} = (ik w + u)/r.
    """
    kmax = state.n_modes - 1
    uq = np.einsum("qn,kn->kq", mesh.P, state.modes[:, 0])
    wq = np.einsum("qn,kn->kq", mesh.P, state.modes[:, 1])
    duq = np.einsum("qn,kn->kq", mesh.Pd, state.modes[:, 0])
    dwq = np.einsum("qn,kn->kq", mesh.Pd, state.modes[:, 1])
    ik = 1j * np.arange(kmax + 1)[:, None]
    rq = mesh.rq[None, :]
    out = np.empty((kmax + 1, 2, 2, mesh.n_quad), dtype=complex)
    out[:, 0, 0] = duq
    out[:, 0, 1] = (ik * uq - wq) / rq
    out[:, 1, 0] = dwq
    out[:, 1, 1] = (ik * wq + uq) / rq
    return out


def strain_quad_modes(state: FlowState, mesh: RadialMesh) -> np.ndarray:
    """Per-mode strain entries (D_rr, D_tt, D_rt) at quadrature points."""
    g = gradient_quad_modes(state, mesh)
    out = np.empty((state.n_modes, 3, mesh.n_quad), dtype=complex)
    out[:, 0] = g[:, 0, 0]
    out[:, 1] = g[:, 1, 1]
    out[:, 2] = 0.5 * (g[:, 0, 1] + g[:, 1, 0])
    return out


def fluid_l2_sq(state: FlowState, mesh: RadialMesh) -> float:
    s = mode_weights(state.n_modes)
    uq = np.einsum("qn,kcn->kcq", mesh.P, state.modes)
    dens = np.sum(np.abs(uq) ** 2, axis=1)  # (K+1, n_quad)
    return float(np.sum(s * (dens @ (mesh.wq * mesh.rq))))


def l2_norm(state: FlowState, mesh: RadialMesh | None = None) -> float:
    """Disk-weighted L2 norm: fluid + (m/pi) * rigid part (closed form)."""
    mesh = mesh or mesh_for(state.grid)
    m = state.body.mass
    disk = m * float(state.ell @ state.ell) + 0.5 * m * state.omega**2
    return float(np.sqrt(fluid_l2_sq(state, mesh) + disk))


def energy(state: FlowState, mesh: RadialMesh | None = None) -> float:
    """Kinetic energy (m |ell|^2 + J omega^2 + ||v||^2) / 2."""
    mesh = mesh or mesh_for(state.grid)
    m, j = state.body.mass, state.body.inertia
    return 0.5 * (
        fluid_l2_sq(state, mesh)
        + m * float(state.ell @ state.ell)
        + j * state.omega**2
    )


def grad_l2_norm_r2(state: FlowState, mesh: RadialMesh | None = None) -> float:
    """||grad V||_{L2(R^2)}: fluid gradient plus the rigid 2 pi omega^2."""
    mesh = mesh or mesh_for(state.grid)
    g = gradient_quad_modes(state, mesh)
    s = mode_weights(state.n_modes)
    dens = np.sum(np.abs(g) ** 2, axis=(1, 2))
    fluid = float(np.sum(s * (dens @ (mesh.wq * mesh.rq))))
    return float(np.sqrt(fluid + 2.0 * np.pi * state.omega**2))


def d_norm_sq(state: FlowState, mesh: RadialMesh | None = None) -> float:
    """int_{F0} |D(v)|^2 (Frobenius, both off-diagonals counted)."""
    mesh = mesh or mesh_for(state.grid)
    d = strain_quad_modes(state, mesh)
    s = mode_weights(state.n_modes)
    dens = np.abs(d[:, 0]) ** 2 + np.abs(d[:, 1]) ** 2 + 2.0 * np.abs(d[:, 2]) ** 2
    return float(np.sum(s * (dens @ (mesh.wq * mesh.rq))))


def _disk_lp(state: FlowState, p: float, n_r=48, n_t=128) -> float:
    """(m/pi) int_{B0} |ell + omega x_perp|^p by polar quadrature."""
    m = state.body.mass
    if p == 2.0:
        return m * float(state.ell @ state.ell) + 0.5 * m * state.omega**2
    r = (np.arange(n_r) + 0.5) / n_r
    th = 2.0 * np.pi * np.arange(n_t) / n_t
    et = np.stack([-np.sin(th), np.cos(th)])
    speed2 = (
        state.ell @ state.ell
        + (state.omega * r[:, None]) ** 2
        + 2.0 * state.omega * r[:, None] * (state.ell @ et)[None, :]
    )
    w = (1.0 / n_r) * (2.0 * np.pi / n_t)
    return m / np.pi * float(np.sum(speed2 ** (p / 2.0) * r[:, None]) * w)


def lp_norm(state: FlowState, p: float, mesh: RadialMesh | None = None) -> float:
    """Disk-weighted L^p norm of V over the truncated domain."""
    mesh = mesh or mesh_for(state.grid)
    if np.isinf(p):
        return max(
            lp_sup_fluid(state, mesh),
            float(np.hypot(*state.ell) + abs(state.omega)),
        )
    n_fft = mesh.fft_size()
    prof = np.einsum("qn,kcn->kcq", mesh.P, state.modes)
    phys = to_physical(prof, n_fft)  # (2, n_quad, n_fft)
    mag2 = phys[0] ** 2 + phys[1] ** 2
    wq = mesh.wq * mesh.rq * (2.0 * np.pi / n_fft)
    fluid = float(np.sum(mag2 ** (p / 2.0) * wq[:, None]))
    return (fluid + _disk_lp(state, p)) ** (1.0 / p)


def lp_norm_fluid(state: FlowState, p: float, mesh: RadialMesh | None = None) -> float:
    """L^p norm of the fluid field over the truncated annulus only."""
    mesh = mesh or mesh_for(state.grid)
    if np.isinf(p):
        return lp_sup_fluid(state, mesh)
    n_fft = mesh.fft_size()
    prof = np.einsum("qn,kcn->kcq", mesh.P, state.modes)
    phys = to_physical(prof, n_fft)
    mag2 = phys[0] ** 2 + phys[1] ** 2
    wq = mesh.wq * mesh.rq * (2.0 * np.pi / n_fft)
    return float(np.sum(mag2 ** (p / 2.0) * wq[:, None]) ** (1.0 / p))


def lp_sup_fluid(state: FlowState, mesh: RadialMesh) -> float:
    n_fft = mesh.fft_size()
    prof = np.einsum("qn,kcn->kcq", mesh.P, state.modes)
    phys = to_physical(prof, n_fft)
    return float(np.sqrt(np.max(phys[0] ** 2 + phys[1] ** 2)))


def grad_lp_norm_fluid(state: FlowState, p: float, mesh: RadialMesh | None = None) -> float:
    """||grad v||_{L^p(F0)} from the four polar gradient entries."""
    mesh = mesh or mesh_for(state.grid)
    g = gradient_quad_modes(state, mesh)  # (K+1, 2, 2, nq)
    n_fft = mesh.fft_size()
    phys = to_physical(g, n_fft)  # (2, 2, nq, n_fft)
    mag2 = np.sum(phys**2, axis=(0, 1))
    if np.isinf(p):
        return float(np.sqrt(np.max(mag2)))
    wq = mesh.wq * mesh.rq * (2.0 * np.pi / n_fft)
    return float(np.sum(mag2 ** (p / 2.0) * wq[:, None]) ** (1.0 / p))


def div_defect(state: FlowState, mesh: RadialMesh | None = None) -> float:
    """L2 norm of the pointwise divergence at quadrature points."""
    mesh = mesh or mesh_for(state.grid)
    uq = np.einsum("qn,kn->kq", mesh.P, state.modes[:, 0])
    wq_ = np.einsum("qn,kn->kq", mesh.P, state.modes[:, 1])
    duq = np.einsum("qn,kn->kq", mesh.Pd, state.modes[:, 0])
    ik = 1j * np.arange(state.n_modes)[:, None]
    div = duq + uq / mesh.rq[None, :] + ik * wq_ / mesh.rq[None, :]
    s = mode_weights(state.n_modes)
    return float(np.sqrt(np.sum(s * (np.abs(div) ** 2 @ (mesh.wq * mesh.rq)))))


def save_snapshot(path, state: FlowState) -> None:
    """Bit-exact self-describing container (npz + json header)."""
    g = state.grid
    meta = {
        "outer_radius": g.outer_radius,
        "radial_points": g.radial_points,
        "fourier_modes": g.fourier_modes,
        "stretching": g.stretching,
        "stretch_beta": g.stretch_beta,
        "mass": state.body.mass,
        "inertia": state.body.inertia,
    }
    np.savez(
        path,
        meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
        modes=state.modes,
        ell=state.ell,
        omega=np.array([state.omega]),
        time=np.array([state.time]),
    )


def load_snapshot(path) -> FlowState:
    from ..oseen import RigidBodyParams

    with np.load(path) as z:
        meta = json.loads(bytes(z["meta"]).decode())
        grid = GridConfig(
            outer_radius=meta["outer_radius"],
            radial_points=int(meta["radial_points"]),
            fourier_modes=int(meta["fourier_modes"]),
            stretching=meta["stretching"],
            stretch_beta=meta["stretch_beta"],
        )
        body = RigidBodyParams(mass=meta["mass"], inertia=meta["inertia"])
        return FlowState(
            grid=grid,
            body=body,
            modes=z["modes"].copy(),
            ell=z["ell"].copy(),
            omega=float(z["omega"][0]),
            time=float(z["time"][0]),
        )
