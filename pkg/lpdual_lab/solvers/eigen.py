"""
Inverse iteration for the critical case p = q:

    det D^2 u = lam g (-u)^(p-1) rho^(n-p),  u = 0 on the boundary.
"""
import time
from typing import Optional, Tuple

import numpy as np

from ..core.config import EIGEN_CLAMP
from ..core.error import ConfigError
from ..core.logger import get_logger
from ..functionals.energy import rayleigh_lambda
from ..grid.field import ScalarField
from ..grid.lattice import Grid
from ..grid.operators import DerivedQuantities, differentiate
from ..models.params import ProblemParams, Tolerances
from ..models.regime import Regime
from ..models.schema import SolveReport, build_solve_report
from .newton import newton_solve
from .rhs import FixedRHS

logger = get_logger(__name__)


def eigen_rhs(
    v: ScalarField, params: ProblemParams, lam: float, dq: Optional[DerivedQuantities] = None
) -> np.ndarray:
    """lam g (-v)^(p-1) rho(v)^(n-p) at the interior nodes."""
    dq = dq if dq is not None else differentiate(v)
    P = params
    return lam * P.g(v.points) * (-v.values) ** (P.p - 1.0) * dq.rho2 ** ((P.n - P.p) / 2.0)


def eigen_residual(v: ScalarField, params: ProblemParams, lam: float, clamp: float) -> float:
    dq = differentiate(v)
    R = dq.log_det_clamped(clamp) - np.log(eigen_rhs(v, params, lam, dq))
    return float(np.max(np.abs(R)))


def default_eigen_start(grid: Grid) -> ScalarField:
    """gauge^2 - 1 scaled to unit sup-norm."""
    return ScalarField(grid, grid.domain.defining_quadratic(grid.points)).normalized()


def eigen_solve(
    params: ProblemParams,
    u0: Optional[ScalarField] = None,
    *,
    grid: Optional[Grid] = None,
    tolerances: Optional[Tolerances] = None,
    clamp: float = EIGEN_CLAMP,
) -> Tuple[float, ScalarField, SolveReport]:
    """
    Normalize, take the Rayleigh quotient, solve the frozen problem, repeat.

    With c = ||u_{k+1}||, the normalized pair (lam_k / c^d, u_{k+1} / c) solves
    the discrete eigen problem up to the change between iterates; that value is
    returned as the eigenvalue. Iteration stops when both the Rayleigh quotient
    and this value change by less than tol_eigen and the pair solves the eigen
    problem to tol_newton.

    Returns:
        (lambda, normalized eigenfunction, report); report.functionals holds the
        Rayleigh quotient of the returned field
    """
    if params.regime != Regime.CRITICAL:
        raise ConfigError("eigen iteration applies to the critical regime p = q >= 1")
    if u0 is None:
        if grid is None:
            raise ConfigError("eigen_solve needs an initial field or a grid")
        u0 = default_eigen_start(grid)
    if not u0.admissible:
        raise ConfigError("initial field for the eigen iteration must be negative inside")

    start = time.perf_counter()
    tol = tolerances or Tolerances()
    inner_tol = tol.model_copy(update={"newton": 0.1 * tol.newton})
    d = params.d
    v = u0.normalized()
    rayleigh_prev = lam_prev = np.inf
    lam = rayleigh = float("nan")
    status = "max_iters"
    outer = 0

    for outer in range(1, tol.max_outer + 1):
        dq = differentiate(v)
        rayleigh = rayleigh_lambda(v, params, dq)
        rhs = FixedRHS(eigen_rhs(v, params, rayleigh, dq))
        u, inner = newton_solve(params, v, rhs=rhs, tolerances=inner_tol, clamp=clamp)
        c = u.sup_norm
        lam = rayleigh / c**d
        v = u.normalized()
        change = max(abs(rayleigh - rayleigh_prev), abs(lam - lam_prev))
        logger.debug(
            f"Eigen iter {outer}: rayleigh={rayleigh:.10f}, lambda={lam:.10f}, "
            f"change={change:.3e}"
        )
        if not inner["converged"]:
            status = "line_search_failed"
            logger.warning(f"Eigen iteration: inner solve failed at outer step {outer}")
            break
        if change < tol.eigen and eigen_residual(v, params, lam, clamp) <= tol.newton:
            status = "converged"
            break
        rayleigh_prev, lam_prev = rayleigh, lam

    dq = differentiate(v)
    report = build_solve_report(
        converged=status == "converged",
        status=status,
        residual=eigen_residual(v, params, lam, clamp),
        iterations=outer,
        convexity_violations=dq.convexity_violations(tol.convex),
        functionals={"lambda": lam, "rayleigh": rayleigh_lambda(v, params, dq)},
        wall_time=time.perf_counter() - start,
    )
    log = logger.info if report["converged"] else logger.warning
    log(f"Eigen iteration {status} after {outer} steps: lambda={lam:.8f}")
    return lam, v, report
