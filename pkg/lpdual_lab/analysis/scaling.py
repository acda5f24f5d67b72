"""
Homogeneity of the right-hand side and the strict uniqueness inequality.
"""
from typing import Any, Dict, List, Sequence

import numpy as np

from ..core.logger import get_logger
from ..models.params import ProblemParams
from ..solvers.rhs import rhs_formula, uniqueness_condition_check

logger = get_logger(__name__)

SCALING_TOL = 1e-12
DEFAULT_TRIALS = 10000
SWEEP_P = (-1.0, 0.0, 0.5, 1.0, 2.0)
SWEEP_Q = (0.5, 1.0, 2.0, 3.0, 4.0)


def scaling_exponent(n: int, p: float, q: float) -> float:
    """e with RHS(x, tu, tDu) = t^e RHS(x, u, Du) at eps = 0."""
    return p - 1.0 + n - q


def scaling_identity_check(
    params: ProblemParams, trials: int = DEFAULT_TRIALS, seed: int = 0
) -> Dict[str, Any]:
    """
    Sample (x, u < 0, Du, t in (0, 1)) and compare RHS(x, tu, tDu) with
    t^e RHS(x, u, Du) at eps = 0, together with the uniqueness inequality.
    """
    rng = np.random.default_rng(seed)
    n, p, q, d = params.n, params.p, params.q, params.d
    x = rng.uniform(-1.0, 1.0, size=(trials, d))
    u = -rng.uniform(0.01, 2.0, size=trials)
    Du = rng.uniform(-2.0, 2.0, size=(trials, d))
    t = rng.uniform(0.0, 1.0, size=trials)
    t = np.where(t > 0, t, 0.5)
    g = params.g(x)
    e = scaling_exponent(n, p, q)
    base = rhs_formula(x, u, Du, n=n, p=p, q=q, g=g)
    scaled = rhs_formula(x, t * u, t[:, None] * Du, n=n, p=p, q=q, g=g)
    deviation = np.abs(scaled - t**e * base) / np.abs(t**e * base)
    worst = float(deviation.max())
    uniqueness = uniqueness_condition_check(n, p, q, seed=seed)
    logger.info(f"Scaling identity: exponent {e:g}, max relative deviation {worst:.3e}")
    return {
        "exponent": e,
        "trials": trials,
        "seed": seed,
        "max_deviation": worst,
        "passed": worst <= SCALING_TOL,
        "uniqueness": uniqueness,
    }


def uniqueness_sweep(
    n: int = 3,
    ps: Sequence[float] = SWEEP_P,
    qs: Sequence[float] = SWEEP_Q,
    samples: int = 1000,
    seed: int = 0,
) -> Dict[str, Any]:
    """The strict inequality flag over a (p, q) grid; it must equal q > p everywhere."""
    rows: List[Dict[str, Any]] = []
    for p in ps:
        for q in qs:
            row = uniqueness_condition_check(n, p, q, samples=samples, seed=seed)
            row["agrees"] = row["holds"] == row["expected"]
            rows.append(row)
    mismatches = [(r["p"], r["q"]) for r in rows if not r["agrees"]]
    if mismatches:
        logger.warning(f"Uniqueness flag disagrees with q > p at {mismatches}")
    return {"n": n, "rows": rows, "passed": not mismatches}
