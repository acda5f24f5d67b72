"""
Energies of the regularized problems, the Rayleigh quotient and the
Sobolev-type and coercivity diagnostics.
"""
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from ..core.error import ConfigError, DomainError
from ..core.logger import get_logger
from ..grid.field import ScalarField
from ..grid.lattice import Grid
from ..grid.operators import DerivedQuantities, differentiate
from ..grid.quadrature import integrate
from ..models.params import ProblemParams
from ..models.regime import Regime
from ..models.schema import FunctionalReport
from .volume import eval_invariant_I0, eval_Vq

logger = get_logger(__name__)


@dataclass(frozen=True)
class PowerF:
    """F(s) = shift + (-s)^power for s <= 0."""
    power: float
    shift: float = 0.0

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return self.shift + np.power(-np.asarray(s, dtype=float), self.power)

    def derivative(self, s: np.ndarray) -> np.ndarray:
        if self.power == 0:
            return np.zeros_like(np.asarray(s, dtype=float))
        return -self.power * np.power(-np.asarray(s, dtype=float), self.power - 1.0)

    def integral_to_zero(self, u: np.ndarray) -> np.ndarray:
        """int_u^0 F(s) ds."""
        m = -np.asarray(u, dtype=float)
        return self.shift * m + m ** (self.power + 1.0) / (self.power + 1.0)


def integral_to_zero(F: Callable[[np.ndarray], np.ndarray], u: np.ndarray) -> np.ndarray:
    """int_u^0 F(s) ds per value; closed form when F provides one, adaptive quadrature otherwise."""
    closed = getattr(F, "integral_to_zero", None)
    if closed is not None:
        return np.asarray(closed(u), dtype=float)
    values = np.asarray(u, dtype=float)
    out = np.empty_like(values)
    for i, ui in enumerate(values):
        out[i] = sp_integrate.quad(lambda s: float(F(np.array([s]))[0]), ui, 0.0, limit=200)[0]
    return out


def _require_p(p: float) -> None:
    if p == 0:
        raise DomainError("J_eps and I_eps are undefined for p = 0")


def _shifted_power(params: ProblemParams, u: ScalarField) -> np.ndarray:
    base = params.eps - u.values
    if np.any(base <= 0):
        raise DomainError("eps - u must be positive at every node")
    return base**params.p


def eval_Jeps(
    u: ScalarField, params: ProblemParams, dq: Optional[DerivedQuantities] = None
) -> float:
    """J_eps(u) = V_q(u) - (1/p) int (eps - u)^p g dx."""
    _require_p(params.p)
    dq = dq if dq is not None else differentiate(u)
    grid = u.grid
    g = params.g(grid.points)
    potential = integrate(
        grid,
        _shifted_power(params, u) * g,
        boundary_trace=(lambda c: params.eps**params.p * params.g(c)) if params.eps > 0 else 0.0,
    )
    return eval_Vq(u, params.q, params.n, dq) - potential / params.p


def eval_Ieps(
    u: ScalarField, params: ProblemParams, dq: Optional[DerivedQuantities] = None
) -> float:
    """I_eps(u) = V_q(u) - (1/p) int [(eps - u)^p - eps^p] g dx."""
    _require_p(params.p)
    dq = dq if dq is not None else differentiate(u)
    grid = u.grid
    g = params.g(grid.points)
    shift = params.eps**params.p if params.eps > 0 else 0.0
    potential = integrate(grid, (_shifted_power(params, u) - shift) * g)
    return eval_Vq(u, params.q, params.n, dq) - potential / params.p


def eps_constant(grid: Grid, params: ProblemParams) -> float:
    """(1/p) int eps^p g dx with the quadrature used by the energies."""
    _require_p(params.p)
    if params.eps == 0:
        return 0.0
    c = params.eps**params.p
    return integrate(
        grid, c * params.g(grid.points), boundary_trace=lambda x: c * params.g(x)
    ) / params.p


def eval_JF(
    u: ScalarField,
    params: ProblemParams,
    F: Callable[[np.ndarray], np.ndarray],
    dq: Optional[DerivedQuantities] = None,
) -> float:
    """J_F(u) = V_p(u) - int g (int_u^0 F(s) ds) dx."""
    dq = dq if dq is not None else differentiate(u)
    inner = integral_to_zero(F, u.values)
    return eval_Vq(u, params.p, params.n, dq) - integrate(u.grid, params.g(u.grid.points) * inner)


def rayleigh_lambda(
    u: ScalarField, params: ProblemParams, dq: Optional[DerivedQuantities] = None
) -> float:
    """p V_p(u) / int (-u)^p g dx; invariant under u -> t u."""
    if np.any(u.values > 0):
        raise DomainError("Rayleigh quotient needs u <= 0")
    denominator = integrate(u.grid, (-u.values) ** params.p * params.g(u.grid.points))
    if not denominator > 0:
        raise DomainError("Rayleigh quotient denominator vanishes")
    return params.p * eval_Vq(u, params.p, params.n, dq) / denominator


def sobolev_catalog(grid: Grid, count: int = 12) -> List[ScalarField]:
    """
    Admissible convex fields vanishing on the boundary.

    Built from the domain gauge: scaled quadratic gauges, gauge powers and
    positive mixtures of them.
    """
    if count < 1:
        raise ConfigError("catalog needs at least one field")
    gamma = grid.domain.gauge(grid.points)
    fields: List[np.ndarray] = []
    for scale in (0.5, 1.0, 2.0):
        fields.append(scale * (gamma**2 - 1.0))
    for beta in (2.5, 3.0, 4.0, 6.0):
        fields.append(gamma**beta - 1.0)
    for w in (0.25, 0.5, 1.0, 2.0, 4.0):
        fields.append((gamma**2 - 1.0) + w * (gamma**4 - 1.0))
    k = 0
    while len(fields) < count:
        k += 1
        fields.append((1.0 + 0.1 * k) * (gamma ** (2.0 + 0.5 * k) - 1.0))
    return [ScalarField(grid, f) for f in fields[:count]]


def sobolev_ratio_catalog(grid: Grid, q: float, n: int, count: int = 12) -> Dict[str, Any]:
    """Ratios q V_q(u) / ||u||^q over the catalog; a positive minimum is the bound."""
    ratios = []
    for u in sobolev_catalog(grid, count):
        ratios.append(q * eval_Vq(u, q, n) / u.sup_norm**q)
    ratios_arr = np.asarray(ratios)
    logger.debug(f"Sobolev ratios: min={ratios_arr.min():.4e}, max={ratios_arr.max():.4e}")
    return {
        "ratios": ratios_arr.tolist(),
        "min_ratio": float(ratios_arr.min()),
        "count": len(ratios),
        "passed": bool(ratios_arr.min() > 0),
    }


def coercivity_constants(a: float, b: float, p: float, q: float) -> Dict[str, float]:
    """sigma and delta of the two-power envelope a s^q - b s^p, p > q."""
    if not (a > 0 and b > 0 and p > q and p != 0):
        raise DomainError("coercivity constants need a, b > 0 and p > q")
    base = q * a / (p * b)
    sigma = base ** (1.0 / (p - q))
    delta = 0.5 * a * ((p - q) / p) * base ** (q / (p - q))
    return {"sigma": float(sigma), "delta": float(delta)}


def coercivity_check(
    u0: ScalarField,
    params: ProblemParams,
    scales: Sequence[float] = tuple(np.geomspace(0.05, 4.0, 16)),
    tol: float = 1e-10,
) -> Dict[str, Any]:
    """
    Evaluate I_eps on t u0 and bound it below by a s^q - b s^p, s = t ||u0||.

    b is the least-squares coefficient of the two-power fit; a is the largest
    value for which the envelope stays below every sample.
    """
    if not params.p > params.q:
        raise ConfigError("coercivity split applies to p > q")
    s = np.asarray(scales, dtype=float) * u0.sup_norm
    values = np.array([eval_Ieps(u0.scaled(t), params) for t in scales])
    design = np.stack([s**params.q, -(s**params.p)], axis=1)
    (a_ls, b_ls), *_ = np.linalg.lstsq(design, values, rcond=None)
    b = float(max(b_ls, 1e-300))
    a = float(np.min((values + b * s**params.p) / s**params.q))
    envelope = a * s**params.q - b * s**params.p
    report: Dict[str, Any] = {
        "s": s.tolist(),
        "I_eps": values.tolist(),
        "a": a,
        "b": b,
        "a_least_squares": float(a_ls),
        "above_envelope": bool(np.all(values >= envelope - tol * (1.0 + np.abs(values)))),
    }
    report["coercive"] = bool(a > 0 and b_ls > 0)
    if report["coercive"]:
        report.update(coercivity_constants(a, b, params.p, params.q))
    return report


def functional_report(
    u: ScalarField,
    params: ProblemParams,
    F: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> FunctionalReport:
    dq = differentiate(u)
    report: FunctionalReport = {
        "V_q": eval_Vq(u, params.q, params.n, dq),
        "J_eps": None,
        "I_eps": None,
        "J_F": None,
        "I_0": eval_invariant_I0(u, params.n, dq),
        "rayleigh": None,
        "parameters": {"n": params.n, "p": params.p, "q": params.q, "eps": params.eps},
    }
    if params.p != 0:
        report["J_eps"] = eval_Jeps(u, params, dq)
        report["I_eps"] = eval_Ieps(u, params, dq)
    if F is not None:
        report["J_F"] = eval_JF(u, params, F, dq)
    if params.regime == Regime.CRITICAL:
        report["rayleigh"] = rayleigh_lambda(u, params, dq)
    return report
