"""
Grid refinement studies against the radial oracle or the finest grid.
"""
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..core.error import GridError
from ..core.logger import get_logger
from ..core.parallel import run_jobs
from ..functionals.volume import eval_Vq
from ..geometry.domain import BaseDomain, Disk
from ..grid.field import ScalarField
from ..grid.lattice import build_grid
from ..models.params import ProblemParams, Tolerances
from ..oracle.radial import RadialProfile, paraboloid, profile_Vq, radial_solve
from ..solvers.newton import solve
from .exponent import fit_boundary_exponent

logger = get_logger(__name__)

FLOOR_FACTOR = 10.0


def is_radial_instance(params: ProblemParams, domain: BaseDomain) -> bool:
    """Centered disk with a rotation-invariant density, so the radial oracle applies."""
    if not isinstance(domain, Disk) or np.any(np.abs(np.asarray(domain.center)) > 0):
        return False
    density = params.density
    if density.family == "bump":
        return not any(abs(c) > 0 for c in density.center)
    return True


def _is_paraboloid(params: ProblemParams) -> bool:
    density = params.density
    return (
        params.p == 1
        and params.q == params.n
        and density.side == "euclidean"
        and density.family == "constant"
        and density.c == 1.0
    )


def _observed_order(e_coarse: float, e_fine: float, N_coarse: int, N_fine: int, floor: float):
    if e_fine <= floor:
        return math.inf
    return math.log(e_coarse / e_fine) / math.log((N_fine - 1) / (N_coarse - 1))


def _restrict(fine: ScalarField, coarse: ScalarField) -> np.ndarray:
    """Values of the fine field at the coarse nodes; the grids must be nested."""
    tree = cKDTree(fine.points)
    dist, idx = tree.query(coarse.points)
    if np.any(dist > 1e-9 * coarse.grid.dx):
        raise GridError("grids are not nested; use N = 2^k + 1 on a fixed domain")
    return fine.values[idx]


def convergence_study(
    params: ProblemParams,
    Ns: Sequence[int],
    *,
    domain: Optional[BaseDomain] = None,
    tolerances: Optional[Tolerances] = None,
    min_offset: float = 0.0,
) -> Dict[str, Any]:
    """
    Solve on each N and report errors and observed orders per quantity.

    The reference is the exact paraboloid or the radial oracle on centered
    disks, otherwise the finest grid. Errors are floored at 10 tol_newton,
    and an order is inf when the finer error sits at the floor.
    """
    tol = tolerances or Tolerances()
    domain = domain or Disk(radius=1.0, ndim=params.d)
    Ns = sorted(Ns)
    floor = FLOOR_FACTOR * tol.newton

    grids = {N: build_grid(domain, N, min_offset=min_offset) for N in Ns}
    jobs = {f"N={N}": (lambda g=grids[N]: solve(params, g, tol)) for N in Ns}
    results, errors = run_jobs(jobs)
    if errors:
        first = next(iter(errors.values()))
        raise first

    profile: Optional[RadialProfile] = None
    if _is_paraboloid(params) and isinstance(domain, Disk) and is_radial_instance(params, domain):
        reference = "paraboloid"
    elif is_radial_instance(params, domain):
        reference = "oracle"
        profile = radial_solve(params, domain.radius)
    else:
        reference = "finest"

    v_ref: Optional[float] = None
    if params.q != 0:
        if reference in ("paraboloid", "oracle"):
            profile = profile or radial_solve(params, domain.radius)
            v_ref = profile_Vq(profile, params)
        else:
            finest = results[f"N={Ns[-1]}"][0]
            v_ref = eval_Vq(finest, params.q, params.n)

    rows: List[Dict[str, Any]] = []
    for N in Ns:
        u, report = results[f"N={N}"]
        if reference == "paraboloid":
            error: Optional[float] = u.distance(paraboloid(u.grid, domain.radius))
        elif reference == "oracle":
            error = u.distance(profile.on_grid(u.grid))
        elif N != Ns[-1]:
            finest = results[f"N={Ns[-1]}"][0]
            error = float(np.max(np.abs(u.values - _restrict(finest, u))))
        else:
            error = None
        row: Dict[str, Any] = {
            "N": N,
            "dx": u.grid.dx,
            "converged": report["converged"],
            "residual": report["residual"],
            "error_linf": None if error is None else max(error, floor),
        }
        if v_ref is not None:
            v = eval_Vq(u, params.q, params.n)
            row["V_q"] = v
            v_err = abs(v - v_ref) if (reference != "finest" or N != Ns[-1]) else None
            row["V_q_error"] = None if v_err is None else max(v_err, floor)
        try:
            row["exponent"] = fit_boundary_exponent(u)["slope"]
        except GridError:
            row["exponent"] = None
        rows.append(row)

    for prev, row in zip(rows, rows[1:]):
        for key in ("error_linf", "V_q_error"):
            a, b = prev.get(key), row.get(key)
            order_key = "order_linf" if key == "error_linf" else "order_V_q"
            row[order_key] = (
                None if a is None or b is None
                else _observed_order(a, b, prev["N"], row["N"], floor)
            )
    logger.info(
        f"Convergence study ({reference}): "
        + ", ".join(f"N={r['N']}: {r['error_linf']}" for r in rows)
    )
    return {"reference": reference, "V_q_reference": v_ref, "floor": floor, "rows": rows}


def orders(study: Dict[str, Any], key: str = "order_linf") -> List[Tuple[int, float]]:
    return [(r["N"], r[key]) for r in study["rows"] if r.get(key) is not None]
