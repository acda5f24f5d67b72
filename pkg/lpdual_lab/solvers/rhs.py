"""
Right-hand sides of the Monge-Ampere equations solved on a grid.

Each model returns log RHS at the interior nodes and its partial derivatives
in u and Du, which enter the Newton Jacobian.
"""
from typing import Any, Callable, Dict, Optional, Protocol, Tuple

import numpy as np

from ..core.error import DomainError
from ..functionals.energy import eval_Jeps, eval_JF
from ..grid.field import ScalarField
from ..grid.lattice import Grid
from ..grid.operators import DerivedQuantities, differentiate
from ..models.params import ProblemParams

Partials = Tuple[np.ndarray, np.ndarray]


class RightHandSide(Protocol):
    """
    Protocol for right-hand sides det D^2 u = RHS(x, u, Du).
    """
    name: str

    def log_value(self, u: np.ndarray, dq: DerivedQuantities) -> np.ndarray:
        ...

    def partials(self, u: np.ndarray, dq: DerivedQuantities) -> Partials:
        ...


def _rho_partials(dq: DerivedQuantities, half_exponent: float) -> Partials:
    """Derivatives of half_exponent * log rho^2 in u and Du."""
    if half_exponent == 0:
        return np.zeros_like(dq.rho2), np.zeros_like(dq.grad)
    d_u = half_exponent * (-2.0 * dq.u_star) / dq.rho2
    d_p = half_exponent * (2.0 * dq.grad + 2.0 * dq.u_star[:, None] * dq.points) / dq.rho2[:, None]
    return d_u, d_p


def _check_rho(dq: DerivedQuantities, exponent: float) -> None:
    if exponent != 0 and np.any(dq.rho2 <= 0):
        raise DomainError("rho^2 vanishes at some node")


def rhs_formula(
    x: np.ndarray,
    u: np.ndarray,
    Du: np.ndarray,
    *,
    n: int,
    p: float,
    q: float,
    eps: float = 0.0,
    g: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    g (eps - u)^(p-1) (|Du|^2 + (x.Du - u)^2)^((n-q)/2) for raw exponents.

    Raises:
        DomainError: eps - u <= 0 or rho^2 = 0
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    Du = np.atleast_2d(np.asarray(Du, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    base = eps - u
    if np.any(base <= 0):
        raise DomainError("eps - u must be positive", details={"min": float(base.min())})
    u_star = np.einsum("ij,ij->i", x, Du) - u
    rho2 = np.sum(Du**2, axis=1) + u_star**2
    if np.any(rho2 <= 0):
        raise DomainError("rho^2 must be positive")
    out = base ** (p - 1.0) * rho2 ** ((n - q) / 2.0)
    return out if g is None else np.asarray(g, dtype=float) * out


def rhs_eval(
    x: np.ndarray, u: np.ndarray, Du: np.ndarray, params: ProblemParams
) -> np.ndarray:
    """
    g(x) (eps - u)^(p-1) (|Du|^2 + (x.Du - u)^2)^((n-q)/2) at arbitrary points.

    Raises:
        DomainError: eps - u <= 0 or rho^2 = 0
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return rhs_formula(
        x, u, Du, n=params.n, p=params.p, q=params.q, eps=params.eps, g=params.g(x)
    )


def uniqueness_condition_check(
    n: int,
    p: float,
    q: float,
    samples: int = 1000,
    seed: int = 0,
    t_range: Tuple[float, float] = (0.05, 0.95),
) -> Dict[str, Any]:
    """
    Test t^d RHS(x, u, Du) < RHS(x, tu, tDu) for t in (0, 1), d = n - 1, at eps = 0.

    The density factor is common to both sides and is left out. A margin of
    1e-9 relative separates a strict inequality from rounding.
    """
    rng = np.random.default_rng(seed)
    d = n - 1
    x = rng.uniform(-1.0, 1.0, size=(samples, d))
    u = -rng.uniform(0.05, 2.0, size=samples)
    Du = rng.uniform(-2.0, 2.0, size=(samples, d))
    t = rng.uniform(*t_range, size=samples)
    lhs = t**d * rhs_formula(x, u, Du, n=n, p=p, q=q)
    rhs = rhs_formula(x, t * u, t[:, None] * Du, n=n, p=p, q=q)
    strict = bool(np.all(rhs > lhs * (1.0 + 1e-9)))
    return {
        "n": n,
        "p": p,
        "q": q,
        "samples": samples,
        "holds": strict,
        "expected": bool(q > p),
        "min_ratio": float(np.min(rhs / lhs)),
        "max_ratio": float(np.max(rhs / lhs)),
    }


class DualMinkowskiRHS:
    """g (eps - u)^(p-1) rho^(n-q)."""

    name = "dual_minkowski"

    def __init__(self, params: ProblemParams, grid: Grid):
        self.params = params
        self.grid = grid
        self.log_g = np.log(params.g(grid.points))

    def _base(self, u: np.ndarray) -> np.ndarray:
        base = self.params.eps - u
        if np.any(base <= 0):
            raise DomainError("eps - u must be positive", details={"min": float(base.min())})
        return base

    def log_value(self, u: np.ndarray, dq: DerivedQuantities) -> np.ndarray:
        P = self.params
        _check_rho(dq, P.n - P.q)
        out = self.log_g + (P.p - 1.0) * np.log(self._base(u))
        if P.n != P.q:
            out = out + 0.5 * (P.n - P.q) * np.log(dq.rho2)
        return out

    def partials(self, u: np.ndarray, dq: DerivedQuantities) -> Partials:
        P = self.params
        d_u, d_p = _rho_partials(dq, 0.5 * (P.n - P.q))
        return d_u - (P.p - 1.0) / self._base(u), d_p

    def energy(self, u: ScalarField, dq: DerivedQuantities) -> float:
        return eval_Jeps(u, self.params, dq)


class FixedRHS:
    """A frozen right-hand side given by its node values."""

    name = "fixed"

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise DomainError("fixed right-hand side must be positive and finite")
        self.log_values = np.log(values)

    def log_value(self, u: np.ndarray, dq: DerivedQuantities) -> np.ndarray:
        return self.log_values

    def partials(self, u: np.ndarray, dq: DerivedQuantities) -> Partials:
        return np.zeros_like(u), np.zeros_like(dq.grad)


class ContinuationRHS:
    """g (1 - s u)^(p-1) rho^(n-p): the critical family, s = 0 is independent of p."""

    name = "continuation"

    def __init__(self, params: ProblemParams, grid: Grid, s: float):
        self.params = params
        self.s = float(s)
        self.log_g = np.log(params.g(grid.points))

    def _base(self, u: np.ndarray) -> np.ndarray:
        base = 1.0 - self.s * u
        if np.any(base <= 0):
            raise DomainError("1 - s u must be positive")
        return base

    def log_value(self, u: np.ndarray, dq: DerivedQuantities) -> np.ndarray:
        P = self.params
        _check_rho(dq, P.n - P.p)
        out = self.log_g.copy()
        if self.s != 0 and P.p != 1:
            out = out + (P.p - 1.0) * np.log(self._base(u))
        if P.n != P.p:
            out = out + 0.5 * (P.n - P.p) * np.log(dq.rho2)
        return out

    def partials(self, u: np.ndarray, dq: DerivedQuantities) -> Partials:
        P = self.params
        d_u, d_p = _rho_partials(dq, 0.5 * (P.n - P.p))
        if self.s != 0 and P.p != 1:
            d_u = d_u - self.s * (P.p - 1.0) / self._base(u)
        return d_u, d_p


class GeneralFRHS:
    """g F(u) rho^(n-p) for the critical case with a general positive F."""

    name = "general_F"

    def __init__(
        self,
        params: ProblemParams,
        grid: Grid,
        F: Callable[[np.ndarray], np.ndarray],
        F_prime: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.params = params
        self.F = F
        self.F_prime = F_prime or getattr(F, "derivative", None)
        self.log_g = np.log(params.g(grid.points))

    def _F(self, u: np.ndarray) -> np.ndarray:
        values = np.asarray(self.F(u), dtype=float)
        if np.any(values <= 0):
            raise DomainError("F must be positive on the range of u")
        return values

    def _F_prime(self, u: np.ndarray) -> np.ndarray:
        if self.F_prime is not None:
            return np.asarray(self.F_prime(u), dtype=float)
        h = 1e-7 * (1.0 + np.abs(u))
        return (np.asarray(self.F(u + h)) - np.asarray(self.F(u - h))) / (2.0 * h)

    def log_value(self, u: np.ndarray, dq: DerivedQuantities) -> np.ndarray:
        P = self.params
        _check_rho(dq, P.n - P.p)
        out = self.log_g + np.log(self._F(u))
        if P.n != P.p:
            out = out + 0.5 * (P.n - P.p) * np.log(dq.rho2)
        return out

    def partials(self, u: np.ndarray, dq: DerivedQuantities) -> Partials:
        P = self.params
        d_u, d_p = _rho_partials(dq, 0.5 * (P.n - P.p))
        return d_u + self._F_prime(u) / self._F(u), d_p

    def energy(self, u: ScalarField, dq: DerivedQuantities) -> float:
        return eval_JF(u, self.params, self.F, dq)


def residual(rhs: RightHandSide, u: ScalarField, dq: DerivedQuantities, clamp: float) -> np.ndarray:
    """log det_clamped D^2 u - log RHS."""
    return dq.log_det_clamped(clamp) - rhs.log_value(u.values, dq)


def evaluate(
    rhs: RightHandSide, values: np.ndarray, grid: Grid, clamp: float
) -> Optional[Tuple[ScalarField, DerivedQuantities, np.ndarray]]:
    """Field, derivatives and residual, or None outside the admissible set."""
    if not np.all(np.isfinite(values)) or not np.all(values < 0):
        return None
    u = ScalarField(grid, values)
    dq = differentiate(u)
    try:
        R = residual(rhs, u, dq, clamp)
    except DomainError:
        return None
    if not np.all(np.isfinite(R)):
        return None
    return u, dq, R
