"""
Elliptic and parabolic solvers for the chart Monge-Ampere equations.
"""
from .continuation import (
    eps_continuation,
    eps_ladder_solve,
    estimate_blowup,
    lower_bound_study,
    measure_star,
    s_continuation,
    s_values_from_eigenvalue,
)
from .eigen import default_eigen_start, eigen_residual, eigen_solve
from .flow import (
    FlowState,
    flow_monitors,
    flow_rhs,
    flow_run,
    flow_step,
    start_flow,
    write_history,
)
from .newton import (
    default_starts,
    initial_guess,
    jacobian,
    multistart_uniqueness,
    newton_solve,
    solve,
)
from .rhs import (
    ContinuationRHS,
    DualMinkowskiRHS,
    FixedRHS,
    GeneralFRHS,
    RightHandSide,
    rhs_eval,
    rhs_formula,
    uniqueness_condition_check,
)

__all__ = [
    # Right-hand sides
    "RightHandSide",
    "DualMinkowskiRHS",
    "FixedRHS",
    "ContinuationRHS",
    "GeneralFRHS",
    "rhs_eval",
    "rhs_formula",
    "uniqueness_condition_check",
    # Newton
    "jacobian",
    "newton_solve",
    "initial_guess",
    "solve",
    "multistart_uniqueness",
    "default_starts",
    # Continuation and eigen
    "eps_continuation",
    "eps_ladder_solve",
    "s_continuation",
    "s_values_from_eigenvalue",
    "estimate_blowup",
    "lower_bound_study",
    "measure_star",
    "eigen_solve",
    "eigen_residual",
    "default_eigen_start",
    # Flow
    "FlowState",
    "flow_rhs",
    "start_flow",
    "flow_step",
    "flow_run",
    "flow_monitors",
    "write_history",
]
