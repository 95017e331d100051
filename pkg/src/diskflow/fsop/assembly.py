"""Discrete fluid-structure operators on the truncated polar grid.

Everything is assembled per Fourier mode from quadrature-level linear
operators, so each form is Hermitian (and PSD where it should be) by
construction:

* gradient form  a(V, W) = int_{R^2} grad V : grad W
                        = fluid quadrature + 2 pi omega_V omega_W,
* weighted mass  b(V, W) = int_{F0} v.w + m ell_V.ell_W + J omega_V omega_W,
* strain form    int_{F0} D(v) : D(w),
* divergence rows tested against piecewise-constant pressures.

The rigid trace is built into the trial space: mode 0 carries the
rotation DOF (v_theta(1) = omega), mode 1 the complex translation DOF
(v_r, v_theta)(1) = (ell_c/2, i ell_c/2); all other modes vanish at r=1,
and every mode vanishes at the artificial boundary r = R.

With this construction the disk rows of the strong operator (the Newton
laws) are the Galerkin rows tested against the rigid basis fields; the
identity int x_perp . 2D(v) n = int x_perp . d_n v + 2 pi omega_v ties
them to the normal-derivative form.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh, lu_factor, lu_solve, null_space

from ..oseen import RigidBodyParams
from .grid import GridConfig, GridConfigError, RadialMesh
from .state import FlowState, mesh_for, mode_weights


class SolveError(RuntimeError):
    """Raised when a linear solve fails or is ill-posed."""


class ModeBlock:
    """All per-mode matrices for one azimuthal index k."""

    def __init__(self, k: int, mesh: RadialMesh, body: RigidBodyParams):
        self.k = k
        n = mesh.n_nodes
        nq = mesh.n_quad
        s_k = 2.0 * np.pi if k == 0 else 4.0 * np.pi
        self.s_k = s_k
        w = s_k * mesh.wq * mesh.rq
        P, Pd, rq = mesh.P, mesh.Pd, mesh.rq
        zero = np.zeros((nq, n))
        ik = 1j * k

        # quadrature-level operators on the full nodal vector [u; w]
        self.val = (
            np.hstack([P, zero]).astype(complex),
            np.hstack([zero, P]).astype(complex),
        )
        self.grad = (
            np.hstack([Pd, zero]).astype(complex),            # (grad v)_{r,r}
            np.hstack([ik * P / rq[:, None], -P / rq[:, None]]),   # (grad v)_{r,t}
            np.hstack([zero, Pd]).astype(complex),            # (grad v)_{t,r}
            np.hstack([P / rq[:, None], ik * P / rq[:, None]]),    # (grad v)_{t,t}
        )
        self.div_op = np.hstack([Pd + P / rq[:, None], ik * P / rq[:, None]])

        def form(ops, weights=None):
            acc = np.zeros((2 * n, 2 * n), dtype=complex)
            for i, L in enumerate(ops):
                c = 1.0 if weights is None else weights[i]
                acc += c * (L.conj().T * w) @ L
            return 0.5 * (acc + acc.conj().T)

        self.M_full = form(self.val)
        self.K_full = form(self.grad)
        d_rt = 0.5 * (self.grad[1] + self.grad[2])
        self.D_full = form((self.grad[0], self.grad[3], d_rt), weights=(1.0, 1.0, 2.0))

        # P0-pressure divergence rows (drop one redundant row for k = 0)
        n_el = mesh.n_elem
        rows = np.zeros((n_el, 2 * n), dtype=complex)
        np.add.at(rows, mesh.elem_of_quad, w[:, None] * self.div_op)
        self.B_full = rows[:-1] if k == 0 else rows

        # embedding of constrained DOFs into nodal values
        interior = np.arange(1, n - 1)
        cols = []
        for comp in (0, 1):
            for i in interior:
                e = np.zeros(2 * n, dtype=complex)
                e[comp * n + i] = 1.0
                cols.append(e)
        self.n_interior = len(cols)
        self.disk_dof = None
        if k == 0:
            e = np.zeros(2 * n, dtype=complex)
            e[n + 0] = 1.0  # v_theta(1) = omega
            cols.append(e)
            self.disk_dof = "omega"
        elif k == 1:
            e = np.zeros(2 * n, dtype=complex)
            e[0] = 0.5      # v_r(1) = ell_c / 2
            e[n + 0] = 0.5j  # v_theta(1) = i ell_c / 2
            cols.append(e)
            self.disk_dof = "ell"
        self.E = np.array(cols).T  # (2n, n_c)
        self.n_c = self.E.shape[1]

        self.M = self.E.conj().T @ self.M_full @ self.E
        self.K = self.E.conj().T @ self.K_full @ self.E
        self.D = self.E.conj().T @ self.D_full @ self.E
        if self.disk_dof == "omega":
            self.M[-1, -1] += body.inertia
            self.K[-1, -1] += 2.0 * np.pi
        elif self.disk_dof == "ell":
            self.M[-1, -1] += body.mass
        self.B = self.B_full @ self.E

        # homogeneous-Dirichlet (tilde_0) space: interior DOFs only
        self.E0 = self.E[:, : self.n_interior]
        self.M0 = self.E0.conj().T @ self.M_full @ self.E0
        self.K0 = self.E0.conj().T @ self.K_full @ self.E0

        self._chol = {}
        self._lu = {}

    # -- factor caches ----------------------------------------------------
    def chol_shifted(self, lam: float, dirichlet=False):
        key = (lam, dirichlet)
        if key not in self._chol:
            if dirichlet:
                mat = self.K0 + lam * self.M0
            else:
                mat = self.K + lam * self.M
            self._chol[key] = cho_factor(mat)
        return self._chol[key]

    def saddle_lu(self, alpha: float, beta: float):
        """LU of [[alpha M + beta K, B^H], [B, 0]]."""
        key = (alpha, beta)
        if key not in self._lu:
            a = alpha * self.M + beta * self.K
            npr = self.B.shape[0]
            z = np.zeros((self.n_c + npr, self.n_c + npr), dtype=complex)
            z[: self.n_c, : self.n_c] = a
            z[: self.n_c, self.n_c :] = self.B.conj().T
            z[self.n_c :, : self.n_c] = self.B
            try:
                self._lu[key] = lu_factor(z)
            except Exception as exc:  # pragma: no cover
                raise SolveError(f"saddle factorization failed (mode {self.k})") from exc
        return self._lu[key]

    def saddle_solve(self, alpha: float, beta: float, rhs):
        lu = self.saddle_lu(alpha, beta)
        full = np.zeros(self.n_c + self.B.shape[0], dtype=complex)
        full[: self.n_c] = rhs
        sol = lu_solve(lu, full)
        return sol[: self.n_c], sol[self.n_c :]


class OperatorAssembly:
    """Assembled fluid-structure operator on a grid, for one body."""

    def __init__(self, grid: GridConfig, body: RigidBodyParams):
        if grid.radial_points < 8:
            raise GridConfigError("grid too coarse for the boundary stencils")
        self.grid = grid
        self.body = body
        self.mesh = mesh_for(grid)
        self.blocks = [
            ModeBlock(k, self.mesh, body) for k in range(grid.fourier_modes + 1)
        ]
        self._eig = {}

    # -- DOF packing -------------------------------------------------------
    def state_to_dofs(self, state: FlowState):
        out = []
        for blk in self.blocks:
            n = self.mesh.n_nodes
            x = np.zeros(blk.n_c, dtype=complex)
            ni = n - 2
            x[:ni] = state.modes[blk.k, 0, 1:-1]
            x[ni : 2 * ni] = state.modes[blk.k, 1, 1:-1]
            if blk.disk_dof == "omega":
                x[-1] = state.omega
            elif blk.disk_dof == "ell":
                x[-1] = state.ell_c()
            out.append(x)
        return out

    def dofs_to_state(self, dofs, time=0.0) -> FlowState:
        n = self.mesh.n_nodes
        modes = np.zeros((len(self.blocks), 2, n), dtype=complex)
        ell = np.zeros(2)
        omega = 0.0
        for blk, x in zip(self.blocks, dofs):
            nodal = blk.E @ x
            modes[blk.k, 0] = nodal[:n]
            modes[blk.k, 1] = nodal[n:]
            if blk.disk_dof == "omega":
                omega = float(np.real(x[-1]))
            elif blk.disk_dof == "ell":
                ell = np.array([np.real(x[-1]), -np.imag(x[-1])])
        return FlowState(
            grid=self.grid, body=self.body, modes=modes, ell=ell, omega=omega, time=time
        )

    def zero_dofs(self):
        return [np.zeros(blk.n_c, dtype=complex) for blk in self.blocks]

    # -- inner products on DOF vectors --------------------------------------
    def b_inner(self, xs, ys) -> float:
        return float(
            sum(np.real(x.conj() @ (blk.M @ y)) for blk, x, y in zip(self.blocks, xs, ys))
        )

    def b_norm(self, xs) -> float:
        return float(np.sqrt(max(self.b_inner(xs, xs), 0.0)))

    def a_inner(self, xs, ys) -> float:
        return float(
            sum(np.real(x.conj() @ (blk.K @ y)) for blk, x, y in zip(self.blocks, xs, ys))
        )

    def d_form(self, xs) -> float:
        return float(
            sum(np.real(x.conj() @ (blk.D @ x)) for blk, x in zip(self.blocks, xs))
        )

    # -- core solves ---------------------------------------------------------
    def project_dofs(self, rhs):
        """b-orthogonal projection onto the discretely divergence-free space:
        solve M X + B^H p = rhs, B X = 0 per mode."""
        return [blk.saddle_solve(1.0, 0.0, r)[0] for blk, r in zip(self.blocks, rhs)]

    def apply_projector(self, state: FlowState) -> FlowState:
        """Leray-type projection of an arbitrary (rigid-on-disk) state."""
        xs = self.state_to_dofs(state)
        rhs = [blk.M @ x for blk, x in zip(self.blocks, xs)]
        return self.dofs_to_state(self.project_dofs(rhs), time=state.time)

    def apply_A_dofs(self, xs):
        """A V = presolve of b(AV, phi) = a(V, phi) over div-free phi."""
        return [
            blk.saddle_solve(1.0, 0.0, blk.K @ x)[0] for blk, x in zip(self.blocks, xs)
        ]

    def apply_A_tilde_dofs(self, xs):
        """tilde A V (no divergence constraint): M^{-1} K per mode."""
        out = []
        for blk, x in zip(self.blocks, xs):
            key = (0.0, "mass")
            if key not in blk._chol:
                blk._chol[key] = cho_factor(blk.M)
            out.append(cho_solve(blk._chol[key], blk.K @ x))
        return out

    def resolvent_tilde_dofs(self, lam: float, rhs):
        """(tilde A + lam)^{-1} applied to a b-functional rhs, per mode."""
        return [
            cho_solve(blk.chol_shifted(lam), r) for blk, r in zip(self.blocks, rhs)
        ]

    def resolvent_constrained_dofs(self, lam: float, rhs):
        """(A + lam)^{-1} on the div-free space (saddle form)."""
        return [
            blk.saddle_solve(lam, 1.0, r)[0] for blk, r in zip(self.blocks, rhs)
        ]

    def mass_rhs(self, xs):
        return [blk.M @ x for blk, x in zip(self.blocks, xs)]

    # -- spectral data (dense oracle; coarse grids only) ---------------------
    def eigenpairs(self, k: int):
        """Eigendecomposition of A restricted to the div-free space, mode k."""
        if k not in self._eig:
            blk = self.blocks[k]
            Z = null_space(blk.B)
            if Z.shape[1] == 0:
                raise SolveError(f"mode {k}: empty divergence-free subspace")
            Kz = Z.conj().T @ blk.K @ Z
            Mz = Z.conj().T @ blk.M @ Z
            vals, vecs = eigh(Kz, Mz)
            self._eig[k] = (vals, Z @ vecs)
        return self._eig[k]

    def apply_spectral(self, func, xs):
        """func(A) V through the dense eigendecomposition (oracle path)."""
        out = []
        for blk, x in zip(self.blocks, xs):
            vals, vecs = self.eigenpairs(blk.k)
            coeff = vecs.conj().T @ (blk.M @ x)
            out.append(vecs @ (func(vals) * coeff))
        return out

    def smallest_eigenvalue(self) -> float:
        return min(self.eigenpairs(k)[0][0] for k in range(len(self.blocks)))

    # -- diagnostics ----------------------------------------------------------
    def symmetry_defect(self) -> float:
        """Max Hermitian defect of the assembled forms, relative."""
        worst = 0.0
        for blk in self.blocks:
            for mat in (blk.M, blk.K, blk.D):
                scale = np.max(np.abs(mat))
                worst = max(worst, np.max(np.abs(mat - mat.conj().T)) / scale)
        return worst

    def operator_symmetry_defect(self, seed=0) -> float:
        """<A V, W> vs <V, A W> on random div-free pairs, relative."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(5):
            v = self.random_divfree_dofs(rng)
            w = self.random_divfree_dofs(rng)
            av, aw = self.apply_A_dofs(v), self.apply_A_dofs(w)
            x, y = self.b_inner(av, w), self.b_inner(v, aw)
            worst = max(worst, abs(x - y) / max(abs(x), abs(y), 1e-30))
        return worst

    def random_divfree_dofs(self, rng):
        raw = [
            (rng.standard_normal(blk.n_c) + 1j * rng.standard_normal(blk.n_c))
            if blk.k > 0
            else rng.standard_normal(blk.n_c).astype(complex)
            for blk in self.blocks
        ]
        rhs = [blk.M @ x for blk, x in zip(self.blocks, raw)]
        return self.project_dofs(rhs)


def assemble_operator(grid: GridConfig, body: RigidBodyParams | None = None) -> OperatorAssembly:
    """Build the discrete operator; homogeneous Dirichlet closes r = R."""
    return OperatorAssembly(grid, body or RigidBodyParams())


def boundary_flux(asm: OperatorAssembly, modes: np.ndarray):
    """Surface integrals of the normal derivative at the disk.

    Returns (force_integral, torque_integral) for
    int_{dB0} d_n v dsigma (c-convention complex) and
    int_{dB0} x_perp . d_n v dsigma, with d_n = -d_r and a 4th-order
    one-sided radial stencil; the theta integral is exact on modes.
    """
    w = asm.mesh.flux_weights
    du1 = modes[1, 0, :5] @ w if modes.shape[0] > 1 else 0.0
    dw1 = modes[1, 1, :5] @ w if modes.shape[0] > 1 else 0.0
    dw0 = modes[0, 1, :5] @ w
    force_c = 2.0 * np.pi * (du1 - 1j * dw1)  # int d_r v, c-convention
    torque = 2.0 * np.pi * np.real(dw0)
    return -force_c, -torque
