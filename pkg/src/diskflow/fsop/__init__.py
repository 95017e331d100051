"""Discrete fluid-structure operator: assembly, semigroup, resolvent,
fractional powers, and the state containers they act on."""

from .assembly import (
    ModeBlock,
    OperatorAssembly,
    SolveError,
    assemble_operator,
    boundary_flux,
)
from .data import (
    bump_tensor_modes,
    localized_ring,
    p_div,
    random_solenoidal,
    sharp_lq_dipole,
    sharp_lq_swirl,
)
from .fracpow import (
    AccuracyError,
    FracDomainError,
    fractional_positive_power,
    fractional_power_apply,
    fractional_preimage,
    r_mu_eps_split,
    spectral_reference,
    sqrt_identity_check,
)
from .grid import GridConfig, GridConfigError, RadialMesh, fd_weights
from .resolvent import (
    ResolventDomainError,
    ResolventField,
    closed_form_residual_study,
    closed_form_resolvent,
    dirichlet_correction,
    newton_law_forms,
    rigid_resolvent_direct,
    rhs_from_state,
    rigid_source_rhs,
    tilde_resolvent_direct,
)
from .semigroup import (
    evolve_semigroup,
    measure_semigroup_decay,
    semigroup_step,
    semigroup_step_dofs,
    step_energy_defect,
)
from .state import (
    FlowState,
    d_norm_sq,
    div_defect,
    empty_state,
    energy,
    fluid_l2_sq,
    grad_l2_norm_r2,
    grad_lp_norm_fluid,
    impose_rigid_trace,
    l2_norm,
    load_snapshot,
    lp_norm,
    lp_norm_fluid,
    mesh_for,
    save_snapshot,
    to_modes,
    to_physical,
    trace_defect,
)
