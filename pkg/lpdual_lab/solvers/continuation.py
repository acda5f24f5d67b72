"""
Warm-started solve chains: eps -> 0 in the singular regime, s -> S in the critical one,
and the lower bound of sup|u_eps| in terms of the domain measure.
"""
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..core.error import ConfigError, ConvergenceError
from ..core.logger import get_logger
from ..geometry.domain import BaseDomain
from ..grid.field import ScalarField
from ..grid.lattice import Grid, build_grid
from ..models.params import ProblemParams, Tolerances
from ..models.regime import Regime
from ..models.schema import SolveReport
from .newton import initial_guess, newton_solve
from .rhs import ContinuationRHS

logger = get_logger(__name__)

MONOTONE_SLACK = 1e-8
LOWER_BOUND_SAFETY = 0.5
LADDER_EPS_START = 0.1
LADDER_RATIO = 0.1**0.5
LADDER_MAX_SPLITS = 6
LADDER_SNAP = 1e-9

Chain = List[Tuple[ScalarField, SolveReport]]


def eps_continuation(
    params: ProblemParams,
    grid: Grid,
    eps_values: Sequence[float],
    *,
    u0: Optional[ScalarField] = None,
    tolerances: Optional[Tolerances] = None,
) -> Dict[str, Any]:
    """
    Solve along a decreasing eps sequence, each solve starting from the previous one.

    The chain stops at the first solve that does not converge; the prefix is
    returned together with the monotonicity diagnostic on the sup-norms.
    """
    if params.regime != Regime.SINGULAR:
        raise ConfigError("eps-continuation applies to the singular regime p < 1, q >= n")
    eps_values = [float(e) for e in eps_values]
    decreasing = all(b < a for a, b in zip(eps_values, eps_values[1:]))
    if not eps_values or eps_values[-1] <= 0 or not decreasing:
        raise ConfigError("eps sequence must be positive and strictly decreasing")

    chain: Chain = []
    current = u0
    for eps in tqdm(eps_values, desc="eps-continuation", leave=False):
        step_params = params.with_eps(eps)
        if current is None:
            current = initial_guess(grid, step_params)
        u, report = newton_solve(step_params, current, tolerances=tolerances)
        logger.info(
            f"eps={eps:.3e}: converged={report['converged']}, sup|u|={u.sup_norm:.6e}"
        )
        if not report["converged"]:
            logger.warning(f"eps-continuation stopped at eps={eps:.3e} ({report['status']})")
            chain.append((u, report))
            break
        chain.append((u, report))
        current = u

    norms = [u.sup_norm for u, _ in chain]
    converged = [r["converged"] for _, r in chain]
    monotone = all(b >= a - MONOTONE_SLACK for a, b in zip(norms, norms[1:]))
    return {
        "eps": eps_values[: len(chain)],
        "chain": chain,
        "sup_norms": norms,
        "all_converged": len(chain) == len(eps_values) and all(converged),
        "monotone": monotone,
    }


def eps_ladder_solve(
    params: ProblemParams,
    grid: Grid,
    *,
    eps_start: float = LADDER_EPS_START,
    ratio: float = LADDER_RATIO,
    max_splits: int = LADDER_MAX_SPLITS,
    u0: Optional[ScalarField] = None,
    tolerances: Optional[Tolerances] = None,
) -> Tuple[ScalarField, SolveReport, Dict[str, Any]]:
    """
    Solve at params.eps by walking eps down from max(eps_start, params.eps).

    Each rung starts from the last converged field. A rung that fails is retried
    with the square root of the ratio, at most ``max_splits`` times in total.

    Returns:
        (field, report, ladder); the report is the one at params.eps, or the
        last converged one with converged=False when the target was not reached

    Raises:
        ConfigError: regime outside p < 1, q >= n, or a ratio outside (0, 1)
    """
    if params.regime != Regime.SINGULAR:
        raise ConfigError("the eps ladder applies to the singular regime p < 1, q >= n")
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"eps ladder ratio must lie in (0, 1), got {ratio}")
    target = params.eps
    eps = max(float(eps_start), target)
    start_params = params.with_eps(eps)
    if u0 is None:
        u0 = initial_guess(grid, start_params)
    u, report = newton_solve(start_params, u0, tolerances=tolerances)
    rungs = [eps]
    splits = 0
    if not report["converged"]:
        logger.warning(f"eps ladder: no solution at the first rung eps={eps:.3e}")
        return u, report, {"eps": [], "splits": 0, "reached": False}

    while eps > target and splits <= max_splits:
        nxt = eps * ratio
        if nxt <= target * (1.0 + LADDER_SNAP):
            nxt = target
        trial, trial_report = newton_solve(params.with_eps(nxt), u, tolerances=tolerances)
        if trial_report["converged"]:
            u, report, eps = trial, trial_report, nxt
            rungs.append(eps)
            logger.debug(f"eps ladder: eps={eps:.3e}, sup|u|={u.sup_norm:.6e}")
            continue
        splits += 1
        ratio = ratio**0.5
        logger.info(f"eps ladder: eps={nxt:.3e} failed, ratio relaxed to {ratio:.4f}")

    reached = eps <= target
    if not reached:
        logger.warning(f"eps ladder stopped at eps={eps:.3e} above the target {target:.3e}")
        report = {**report, "converged": False, "status": "eps_ladder_stalled"}
    else:
        logger.info(f"eps ladder reached eps={target:.3e} in {len(rungs)} rungs")
    return u, report, {"eps": rungs, "splits": splits, "reached": reached}


def s_values_from_eigenvalue(lam: float, p: float, fractions: Sequence[float]) -> List[float]:
    """s = fraction * lam^(1/(p-1)), the fractions of the blow-up value S."""
    if p <= 1:
        raise ConfigError("s-continuation needs p > 1")
    S = lam ** (1.0 / (p - 1.0))
    return [float(f) * S for f in fractions]


def estimate_blowup(s: Sequence[float], norms: Sequence[float], points: int = 3) -> Optional[float]:
    """
    Zero of the straight line through the last reciprocal sup-norms.

    Returns:
        The extrapolated S, or None when the reciprocal norms are not decreasing
    """
    if len(s) < 2:
        return None
    s_arr = np.asarray(s[-points:], dtype=float)
    inv = 1.0 / np.asarray(norms[-points:], dtype=float)
    slope, intercept = np.polyfit(s_arr, inv, 1)
    if not slope < 0:
        return None
    return float(-intercept / slope)


def s_continuation(
    params: ProblemParams,
    grid: Grid,
    s_values: Sequence[float],
    *,
    tolerances: Optional[Tolerances] = None,
) -> Dict[str, Any]:
    """
    Solve det D^2 u = g (1 - s u)^(p-1) rho^(n-p) along increasing s.

    S is estimated from the divergence of sup|u_s|; S^(p-1) estimates the
    eigenvalue.
    """
    if params.regime != Regime.CRITICAL:
        raise ConfigError("s-continuation applies to the critical regime p = q")
    s_values = [float(s) for s in s_values]
    if not s_values or s_values[0] < 0 or any(b <= a for a, b in zip(s_values, s_values[1:])):
        raise ConfigError("s sequence must start at s >= 0 and increase strictly")

    chain: Chain = []
    current: Optional[ScalarField] = None
    for s in tqdm(s_values, desc="s-continuation", leave=False):
        rhs = ContinuationRHS(params, grid, s)
        if current is None:
            current = initial_guess(grid, params, rhs=rhs)
        try:
            u, report = newton_solve(params, current, rhs=rhs, tolerances=tolerances)
        except ConvergenceError as e:
            logger.warning(f"s-continuation stopped at s={s:.4f}: {e}")
            break
        logger.info(f"s={s:.4f}: converged={report['converged']}, sup|u|={u.sup_norm:.6e}")
        if not report["converged"]:
            logger.warning(f"s-continuation stopped at s={s:.4f} ({report['status']})")
            break
        chain.append((u, report))
        current = u

    used = s_values[: len(chain)]
    norms = [u.sup_norm for u, _ in chain]
    S = estimate_blowup(used, norms)
    return {
        "s": used,
        "chain": chain,
        "sup_norms": norms,
        "all_converged": len(chain) == len(s_values),
        "increasing": all(b > a for a, b in zip(norms, norms[1:])),
        "S": S,
        "lambda_estimate": None if S is None else float(S ** (params.p - 1.0)),
    }


def measure_star(measure: float, n: int, q: float) -> float:
    """min(|U|^2, |U|^((n+q-2)/(n-1)))."""
    return float(min(measure**2, measure ** ((n + q - 2.0) / (n - 1.0))))


def lower_bound_study(
    params: ProblemParams,
    domains: Sequence[BaseDomain],
    N: int,
    *,
    min_offset: float = 0.0,
    tolerances: Optional[Tolerances] = None,
) -> Dict[str, Any]:
    """
    sup|u_eps| against |U|* over several domains.

    The constant c1 is measured as min s^(q-1) (s + eps)^(1-p) / |U|* and
    calibrated on the first domain with a safety factor; then
    c = (c1 / 2^(1-p))^(1/(q-p)) and eps_0 = (c1 |U|* / 2^(2-p))^(1/(q-p)).
    The bound sup|u| >= c |U|*^(1/(q-p)) is checked on every domain.
    """
    if params.regime != Regime.SINGULAR:
        raise ConfigError("the lower-bound study applies to the singular regime")
    if len(domains) < 2:
        raise ConfigError("the lower-bound study needs at least two domains")
    n, p, q, eps = params.n, params.p, params.q, params.eps

    rows: List[Dict[str, Any]] = []
    for domain in tqdm(domains, desc="lower-bound domains", leave=False):
        grid = build_grid(domain, N, min_offset)
        u, report = newton_solve(params, initial_guess(grid, params), tolerances=tolerances)
        s = u.sup_norm
        measure = domain.measure
        star = measure_star(measure, n, q)
        rows.append({
            "domain": domain.describe(),
            "measure": measure,
            "measure_star": star,
            "sup_norm": s,
            "converged": report["converged"],
            "c1_observed": s ** (q - 1.0) * (s + eps) ** (1.0 - p) / star,
        })

    c1 = LOWER_BOUND_SAFETY * rows[0]["c1_observed"]
    c = (c1 / 2.0 ** (1.0 - p)) ** (1.0 / (q - p))
    for row in rows:
        row["eps_0"] = (c1 * row["measure_star"] / 2.0 ** (2.0 - p)) ** (1.0 / (q - p))
        row["bound"] = c * row["measure_star"] ** (1.0 / (q - p))
        row["eps_below_eps_0"] = bool(eps < row["eps_0"])
        row["holds"] = bool(row["sup_norm"] >= row["bound"])

    log_m = np.log([r["measure"] for r in rows])
    power = float(np.polyfit(log_m, np.log([r["sup_norm"] for r in rows]), 1)[0])
    star_power = float(np.polyfit(log_m, np.log([r["measure_star"] for r in rows]), 1)[0])
    predicted = star_power / (q - p)
    return {
        "rows": rows,
        "c1": c1,
        "c": c,
        "all_converged": all(r["converged"] for r in rows),
        "bound_holds": all(r["holds"] for r in rows),
        "measured_power": power,
        "predicted_power": predicted,
        "power_relative_error": abs(power - predicted) / abs(predicted),
    }
