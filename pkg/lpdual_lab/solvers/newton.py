"""
Damped Newton method for det D^2 u = RHS(x, u, Du) with u = 0 on the boundary.

The residual is R(u) = log det_clamped D^2 u - log RHS; the Jacobian is built
from the same stencils as the residual, including the boundary-adjacent rows.
"""
import time
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from ..core.config import DEFAULT_MAX_LINE_SEARCH, EIGEN_CLAMP
from ..core.error import ConvergenceError, DomainError
from ..core.logger import get_logger
from ..core.parallel import run_jobs
from ..functionals.energy import eval_Jeps
from ..functionals.volume import eval_Vq
from ..grid.field import ScalarField
from ..grid.lattice import Grid
from ..grid.operators import DerivedQuantities, differentiate
from ..grid.quadrature import node_weights
from ..models.params import ProblemParams, Tolerances
from ..models.schema import SolveReport, build_solve_report
from .rhs import DualMinkowskiRHS, RightHandSide, evaluate

logger = get_logger(__name__)

ARMIJO = 1e-4
GUESS_SCALES = np.logspace(-3.0, 3.0, 61)


def jacobian(
    rhs: RightHandSide, u: ScalarField, dq: DerivedQuantities, clamp: float = EIGEN_CLAMP
) -> sparse.csc_matrix:
    """Linearization of R at u: tr(H_c^-1 D^2 .) - d_u log RHS - d_Du log RHS . D."""
    grid = u.grid
    st = grid.stencils
    inv = dq.inverse_hessian_clamped(clamp)
    d = grid.dim
    J = sparse.csr_matrix((grid.size, grid.size))
    for i in range(d):
        for j in range(i, d):
            weight = inv[:, i, j] * (1.0 if i == j else 2.0)
            J = J + sparse.diags(weight) @ st.hessian(i, j)[0]
    d_u, d_p = rhs.partials(u.values, dq)
    J = J - sparse.diags(d_u)
    for k in range(d):
        J = J - sparse.diags(d_p[:, k]) @ st.gradient(k)[0]
    return J.tocsc()


def _weighted_norm(R: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.dot(weights, R * R)))


def solve_functionals(
    u: ScalarField, params: ProblemParams, dq: Optional[DerivedQuantities] = None
) -> Dict[str, float]:
    """V_q and, when defined, J_eps of a solution."""
    out: Dict[str, float] = {}
    dq = dq if dq is not None else differentiate(u)
    try:
        out["V_q"] = eval_Vq(u, params.q, params.n, dq)
        if params.p != 0:
            out["J_eps"] = eval_Jeps(u, params, dq)
    except DomainError as e:
        logger.warning(f"Functionals unavailable at the returned field: {e}")
    return out


def newton_solve(
    params: ProblemParams,
    u0: ScalarField,
    *,
    rhs: Optional[RightHandSide] = None,
    tolerances: Optional[Tolerances] = None,
    clamp: float = EIGEN_CLAMP,
) -> Tuple[ScalarField, SolveReport]:
    """
    Damped Newton iteration from an admissible convex start.

    Returns the converged field, or the iterate with the smallest residual
    together with converged=False when the iteration or the line search fails.

    Raises:
        DomainError: u0 is not admissible for the right-hand side
    """
    start = time.perf_counter()
    tol = tolerances or Tolerances()
    grid = u0.grid
    rhs = rhs or DualMinkowskiRHS(params, grid)
    weights = node_weights(grid)

    state = evaluate(rhs, u0.values, grid, clamp)
    if state is None:
        raise DomainError("initial field is not admissible for this right-hand side")
    u, dq, R = state
    best = (float(np.max(np.abs(R))), u, dq)
    status = "max_iters"
    iterations = 0

    for iterations in range(tol.max_iters + 1):
        r_inf = float(np.max(np.abs(R)))
        if r_inf < best[0]:
            best = (r_inf, u, dq)
        logger.debug(f"Newton iter {iterations}: |R|_inf={r_inf:.3e}")
        if r_inf <= tol.newton:
            status = "converged"
            best = (r_inf, u, dq)
            break
        if iterations == tol.max_iters:
            break

        J = jacobian(rhs, u, dq, clamp)
        delta = spsolve(J, -R)
        if not np.all(np.isfinite(delta)):
            status = "line_search_failed"
            logger.warning(f"Newton: singular Jacobian at iteration {iterations}")
            break

        merit = _weighted_norm(R, weights)
        alpha = 1.0
        accepted = None
        for _ in range(DEFAULT_MAX_LINE_SEARCH):
            trial = evaluate(rhs, u.values + alpha * delta, grid, clamp)
            if trial is not None and _weighted_norm(trial[2], weights) <= (
                1.0 - ARMIJO * alpha
            ) * merit:
                accepted = trial
                break
            alpha *= 0.5
        if accepted is None:
            status = "line_search_failed"
            logger.warning(
                f"Newton: line search failed at iteration {iterations}, |R|={r_inf:.3e}"
            )
            break
        u, dq, R = accepted

    residual_inf, u_out, dq_out = best
    report = build_solve_report(
        converged=status == "converged",
        status=status,
        residual=residual_inf,
        iterations=iterations,
        convexity_violations=dq_out.convexity_violations(tol.convex),
        functionals=solve_functionals(u_out, params, dq_out)
        if isinstance(rhs, DualMinkowskiRHS) else {},
        wall_time=time.perf_counter() - start,
    )
    log = logger.info if report["converged"] else logger.warning
    log(f"Newton {status} after {iterations} iterations, residual {residual_inf:.3e}")
    return u_out, report


def initial_guess(
    grid: Grid,
    params: ProblemParams,
    *,
    rhs: Optional[RightHandSide] = None,
    require_negative_energy: bool = False,
    clamp: float = EIGEN_CLAMP,
) -> ScalarField:
    """
    m * (gauge^2 - 1) with m chosen on a log grid by weighted RMS residual.

    Raises:
        ConvergenceError: no scale gives an admissible start
    """
    rhs = rhs or DualMinkowskiRHS(params, grid)
    base = grid.domain.defining_quadratic(grid.points)
    weights = node_weights(grid)
    total = float(weights.sum())
    best: Optional[Tuple[float, ScalarField]] = None
    for m in GUESS_SCALES:
        state = evaluate(rhs, m * base, grid, clamp)
        if state is None:
            continue
        u, dq, R = state
        if require_negative_energy:
            energy = getattr(rhs, "energy", None)
            try:
                if energy is None or not energy(u, dq) < 0:
                    continue
            except DomainError:
                continue
        rms = np.sqrt(np.dot(weights, R * R) / total)
        if best is None or rms < best[0]:
            best = (float(rms), u)
    if best is None:
        raise ConvergenceError(
            "initial guess scan found no admissible start",
            details={"scales": [float(GUESS_SCALES[0]), float(GUESS_SCALES[-1])]},
        )
    logger.debug(f"Initial guess: weighted RMS residual {best[0]:.3e}")
    return best[1]


def solve(
    params: ProblemParams, grid: Grid, tolerances: Optional[Tolerances] = None
) -> Tuple[ScalarField, SolveReport]:
    """newton_solve from the scanned initial guess."""
    u0 = initial_guess(grid, params)
    return newton_solve(params, u0, tolerances=tolerances)


def multistart_uniqueness(
    params: ProblemParams,
    grid: Grid,
    starts: Sequence[ScalarField],
    tolerances: Optional[Tolerances] = None,
) -> Dict[str, Any]:
    """
    Solve from several initial fields concurrently and compare the solutions.

    Returns:
        Reports per start, pairwise L-infinity distances and their maximum
    """
    jobs = {
        f"start_{i}": (lambda u0=u0: newton_solve(params, u0, tolerances=tolerances))
        for i, u0 in enumerate(starts)
    }
    results, errors = run_jobs(jobs)
    names: List[str] = list(results)
    distances = {
        f"{a}|{b}": results[a][0].distance(results[b][0]) for a, b in combinations(names, 2)
    }
    return {
        "reports": {name: results[name][1] for name in names},
        "errors": {name: str(e) for name, e in errors.items()},
        "distances": distances,
        "max_distance": max(distances.values()) if distances else 0.0,
        "all_converged": all(results[name][1]["converged"] for name in names) and not errors,
        "solutions": [results[name][0] for name in names],
    }


def default_starts(grid: Grid, params: ProblemParams) -> List[ScalarField]:
    """Three distinct admissible starts: two quadratic-gauge scales and a quartic mixture."""
    gamma = grid.domain.gauge(grid.points)
    base = initial_guess(grid, params)
    m = float(base.values.min() / np.min(gamma**2 - 1.0))
    return [
        ScalarField(grid, 0.5 * m * (gamma**2 - 1.0)),
        ScalarField(grid, 2.0 * m * (gamma**2 - 1.0)),
        ScalarField(grid, m * ((gamma**2 - 1.0) + 0.5 * (gamma**4 - 1.0))),
    ]
