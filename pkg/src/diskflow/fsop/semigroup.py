"""Crank-Nicolson semigroup on the divergence-free space, and decay fits.

One step solves, per Fourier mode,

    (M + dt/2 K) V1 + B^H p = (M - dt/2 K) V0 + dt * forcing,   B V1 = 0,

which is an exact contraction of the weighted norm (K is PSD) and
satisfies the discrete energy identity

    ||V1||^2 - ||V0||^2 = -2 dt a(Vmid, Vmid) + 2 dt <forcing, Vmid>

to roundoff, with Vmid the trapezoidal midfield.
"""

from __future__ import annotations

import numpy as np

from .assembly import OperatorAssembly, SolveError
from .state import FlowState, grad_lp_norm_fluid, lp_norm


def semigroup_step_dofs(asm: OperatorAssembly, dofs, dt: float, forcing=None):
    """Advance d_t V + A V = forcing by one CN step on DOF vectors."""
    if dt <= 0.0:
        raise SolveError("dt must be positive")
    out = []
    for i, blk in enumerate(asm.blocks):
        rhs = blk.M @ dofs[i] - 0.5 * dt * (blk.K @ dofs[i])
        if forcing is not None and forcing[i] is not None:
            rhs = rhs + dt * forcing[i]
        x, _ = blk.saddle_solve(1.0, 0.5 * dt, rhs)
        if not np.all(np.isfinite(x)):
            raise SolveError(
                f"semigroup solve produced non-finite values (mode {blk.k}, dt={dt})"
            )
        out.append(x)
    return out


def semigroup_step(asm: OperatorAssembly, state: FlowState, dt: float) -> FlowState:
    dofs = semigroup_step_dofs(asm, asm.state_to_dofs(state), dt)
    out = asm.dofs_to_state(dofs, time=state.time + dt)
    return out


def step_energy_defect(asm: OperatorAssembly, before, after, dt: float) -> float:
    """|  ||V1||^2 - ||V0||^2 + 2 dt a(Vmid) | / ||V0||^2 for one step."""
    mid = [0.5 * (a + b) for a, b in zip(before, after)]
    lhs = asm.b_inner(after, after) - asm.b_inner(before, before)
    return abs(lhs + 2.0 * dt * asm.a_inner(mid, mid)) / asm.b_inner(before, before)


def evolve_semigroup(
    asm: OperatorAssembly,
    v0: FlowState,
    dt: float,
    horizon: float,
    sample_every: int = 10,
    observables=None,
    check_contraction: bool = True,
):
    """March the linear system, recording observables at sampled steps.

    ``observables`` maps name -> callable(FlowState) -> float.  Returns a
    dict of time/value arrays plus the final state.
    """
    observables = observables or {}
    dofs = asm.state_to_dofs(v0)
    n_steps = int(round(horizon / dt))
    times = [v0.time]
    records = {name: [fn(v0)] for name, fn in observables.items()}
    norm_prev = asm.b_norm(dofs)
    contraction_ok = True
    for i in range(1, n_steps + 1):
        dofs = semigroup_step_dofs(asm, dofs, dt)
        norm_new = asm.b_norm(dofs)
        if check_contraction and norm_new > norm_prev * (1.0 + 1e-12):
            contraction_ok = False
        norm_prev = norm_new
        if i % sample_every == 0 or i == n_steps:
            st = asm.dofs_to_state(dofs, time=v0.time + i * dt)
            times.append(st.time)
            for name, fn in observables.items():
                records[name].append(fn(st))
    final = asm.dofs_to_state(dofs, time=v0.time + n_steps * dt)
    return {
        "t": np.array(times),
        "series": {k: np.array(v) for k, v in records.items()},
        "final": final,
        "contraction_ok": contraction_ok,
    }


def measure_semigroup_decay(
    asm: OperatorAssembly,
    v0: FlowState,
    q: float,
    p: float,
    horizon: float,
    dt: float = 0.05,
    sample_every: int = 10,
):
    """Evolve S(t)V0 and fit the decay exponents of ||.||_p, ||grad .||_p, |ell|.

    Fits run on the window [1, horizon]; horizons beyond the trust window
    R^2/16 are flagged, not rejected.
    """
    from .. import decayfit

    if not (1.0 < q <= p):
        raise SolveError("decay measurement requires 1 < q <= p")
    trust = asm.grid.trust_horizon
    obs = {
        "lp": lambda s: lp_norm(s, p, asm.mesh),
        "grad_lp": lambda s: grad_lp_norm_fluid(s, p, asm.mesh),
        "ell": lambda s: float(np.hypot(*s.ell)),
    }
    run = evolve_semigroup(asm, v0, dt, horizon, sample_every, obs)
    t = run["t"]
    window = (1.0, horizon)
    out = {
        "t": t,
        "series": run["series"],
        "contraction_ok": run["contraction_ok"],
        "truncation_warning": horizon > trust,
        "targets": {
            "lp": 1.0 / p - 1.0 / q,
            "grad_lp_small_t": -0.5 + 1.0 / p - 1.0 / q,
            "grad_lp_large_t": -1.0 / q if p >= 2.0 else None,
        },
        "fits": {},
    }
    for name in ("lp", "grad_lp", "ell"):
        y = run["series"][name]
        mask = y > 0
        try:
            out["fits"][name] = decayfit.fit_decay(
                t[mask], y[mask], window=window, trust_horizon=trust
            )
        except decayfit.FitError:
            out["fits"][name] = None
    return out
