"""
Radial shooting oracle for rotationally symmetric instances on a centered disk.

For u(x) = U(|x|) in chart dimension d = n - 1 the equation reduces to

    U'' (U'/r)^(d-1) = lam g(r) (eps - U)^(p-1) (U'^2 + (r U' - U)^2)^((n-q)/2)

which is integrated outward from a series start U ~ U(0) + (A/2) r^2 with
A^d = RHS(0, U(0), 0). The free parameter (depth m = -U(0), or lam with
U(0) = -1) is bisected until U(R) = 0.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import quad, solve_ivp

from ..core.config import ODE_ATOL, ODE_RTOL, SHOOT_TOL
from ..core.error import ConfigError, ConvergenceError
from ..core.logger import get_logger
from ..grid.field import ScalarField
from ..grid.io import write_table
from ..grid.lattice import Grid
from ..models.params import ProblemParams
from ..models.regime import Regime

logger = get_logger(__name__)

# series start radius as a fraction of R
START_FRACTION = 1e-6
MAX_BRACKET = 80
MAX_BISECT = 200
PROFILE_SAMPLES = 2001
PROFILE_COLUMNS = ["r", "u", "du"]

RadialRHS = Callable[[float, float, float], float]


class _Shot(NamedTuple):
    overshoot: bool
    boundary_value: float
    r_end: float
    sol: Any


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """
    Sampled radial solution with its dense interpolant.

    r, u, du: samples on [0, R]; m = -u(0); lam is 1 for the fixed-RHS problem
    and the shooting eigenvalue for radial_eigen.
    """
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    m: float
    R: float
    boundary_value: float
    lam: float = 1.0
    iterations: int = 0
    r0: float = field(default=0.0, repr=False)
    A: float = field(default=0.0, repr=False)
    sol: Any = field(default=None, repr=False)

    def evaluate(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """u and u' at radii r, clipped to [0, R]."""
        r = np.clip(np.atleast_1d(np.asarray(r, dtype=float)), 0.0, self.R)
        u = -self.m + 0.5 * self.A * r**2
        du = self.A * r
        outer = r >= self.r0
        if np.any(outer):
            y = self.sol(r[outer])
            u[outer] = y[0]
            du[outer] = y[1]
        return u, du

    def on_grid(self, grid: Grid) -> ScalarField:
        """The profile at the interior nodes of a grid on the same disk."""
        u, _ = self.evaluate(np.linalg.norm(grid.points, axis=1))
        return ScalarField(grid, u)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r": self.r, "u": self.u, "du": self.du})

    def describe(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "R": self.R,
            "lambda": self.lam,
            "boundary_value": self.boundary_value,
            "iterations": self.iterations,
            "convex": bool(np.all(np.diff(self.du) >= -1e-12 * max(1.0, float(self.du.max())))),
        }


def write_profile(profile: RadialProfile, path: Union[str, Path]) -> Path:
    return write_table(profile.frame(), path, PROFILE_COLUMNS)


def _radial_density(params: ProblemParams) -> Callable[[float], float]:
    """g along the positive x1 axis; g is assumed radial."""
    if params.density.family == "constant" and params.density.side == "euclidean":
        c = float(params.density.c)
        return lambda r: c
    d = params.d

    def g(r: float) -> float:
        point = np.zeros((1, d))
        point[0, 0] = r
        return float(params.g(point)[0])

    return g


def _rhs_function(params: ProblemParams, lam: float = 1.0) -> RadialRHS:
    g = _radial_density(params)
    n, p, q, eps = params.n, params.p, params.q, params.eps
    half = (n - q) / 2.0

    def rhs(r: float, u: float, du: float) -> float:
        base = max(eps - u, 1e-300)
        value = lam * g(r) * base ** (p - 1.0)
        if half != 0:
            value *= (du * du + (r * du - u) ** 2) ** half
        return value

    return rhs


def _check_disk(params: ProblemParams, R: float) -> None:
    if R <= 0:
        raise ConfigError(f"disk radius must be positive, got {R}")
    density = params.density
    if density.family == "bump" and any(abs(c) > 0 for c in density.center):
        raise ConfigError("the radial oracle needs a density centered at the origin")


def _shoot(
    rhs: RadialRHS,
    u0: float,
    R: float,
    d: int,
    rtol: float,
    atol: float,
    dense: bool = False,
) -> Tuple[_Shot, float]:
    """Integrate from the series start to R; terminate where u crosses 0."""
    A = rhs(0.0, u0, 0.0) ** (1.0 / d)
    r0 = START_FRACTION * R
    y0 = [u0 + 0.5 * A * r0**2, A * r0]

    def ode(r: float, y: np.ndarray) -> list:
        u, du = y
        f = rhs(r, u, du)
        if d == 1:
            return [du, f]
        return [du, f * (r / du) ** (d - 1)]

    def crossing(r: float, y: np.ndarray) -> float:
        return y[0]

    crossing.terminal = True
    crossing.direction = 1.0

    sol = solve_ivp(
        ode,
        (r0, R),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=atol,
        events=crossing,
        dense_output=dense,
    )
    if sol.status == -1:
        raise ConvergenceError(
            "radial ODE integration failed",
            details={"message": sol.message, "r": float(sol.t[-1]), "u0": u0},
        )
    if sol.status == 1:
        return _Shot(True, float(R - sol.t[-1]), float(sol.t[-1]), sol.sol), A
    return _Shot(False, float(sol.y[0, -1]), R, sol.sol), A


def _bisect(
    shoot: Callable[[float], _Shot], x0: float, over_below: bool, label: str
) -> Tuple[float, _Shot, int]:
    """
    Bracket the parameter between an overshooting and an undershooting shot,
    then bisect until the undershooting end has |u(R)| <= SHOOT_TOL.

    over_below: small parameter values overshoot (true for the depth m).
    """
    x_over: Optional[float] = None
    x_under: Optional[float] = None
    under: Optional[_Shot] = None
    x = x0
    for _ in range(MAX_BRACKET):
        shot = shoot(x)
        if shot.overshoot:
            x_over = x
        else:
            x_under, under = x, shot
        if x_over is not None and x_under is not None:
            break
        grow = (x_under is None) == over_below
        x = x * 2.0 if grow else x * 0.5
    else:
        raise ConvergenceError(
            f"shooting bracket failure for {label}",
            details={"last": x, "overshoot_at": x_over, "undershoot_at": x_under},
        )

    for it in range(MAX_BISECT):
        if abs(under.boundary_value) <= SHOOT_TOL:
            logger.debug(f"Shooting on {label} converged after {it} bisections: {x_under:.15g}")
            return x_under, under, it
        mid = 0.5 * (x_over + x_under)
        if mid == x_over or mid == x_under:
            break
        shot = shoot(mid)
        if shot.overshoot:
            x_over = mid
        else:
            x_under, under = mid, shot
    raise ConvergenceError(
        f"shooting on {label} stalled above tolerance",
        details={"parameter": x_under, "boundary_value": under.boundary_value},
    )


def _sample(
    rhs: RadialRHS,
    u0: float,
    R: float,
    d: int,
    rtol: float,
    atol: float,
    samples: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float, float, Any, float]:
    shot, A = _shoot(rhs, u0, R, d, rtol, atol, dense=True)
    if shot.overshoot:
        raise ConvergenceError("final radial shot does not reach the boundary")
    r0 = START_FRACTION * R
    r = np.linspace(0.0, R, samples)
    u = u0 + 0.5 * A * r**2
    du = A * r
    outer = r >= r0
    y = shot.sol(r[outer])
    u[outer] = y[0]
    du[outer] = y[1]
    return r, u, du, A, r0, shot.sol, shot.boundary_value


def radial_solve(
    params: ProblemParams,
    R: float = 1.0,
    *,
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
    samples: int = PROFILE_SAMPLES,
) -> RadialProfile:
    """
    Radial solution of det D^2 u = RHS on the disk of radius R by shooting on m = -u(0).

    Raises:
        ConfigError: non-radial density or bad radius
        ConvergenceError: bracket failure, integrator failure or stalled bisection
    """
    _check_disk(params, R)
    rhs = _rhs_function(params)
    d = params.d

    def shoot(m: float) -> _Shot:
        return _shoot(rhs, -m, R, d, rtol, atol)[0]

    m, _, iterations = _bisect(shoot, 0.5 * R * R, over_below=True, label="depth m")
    r, u, du, A, r0, sol, boundary = _sample(rhs, -m, R, d, rtol, atol, samples)
    logger.info(f"Radial solve: m={m:.12g}, u(R)={boundary:.3e}, {iterations} bisections")
    return RadialProfile(
        r=r, u=u, du=du, m=m, R=R, boundary_value=boundary,
        iterations=iterations, r0=r0, A=A, sol=sol,
    )


def radial_eigen(
    params: ProblemParams,
    R: float = 1.0,
    *,
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
    samples: int = PROFILE_SAMPLES,
) -> RadialProfile:
    """
    Eigenvalue of the critical case p = q by shooting on lam with u(0) = -1.

    The returned profile has sup-norm 1 and carries lam.

    Raises:
        ConfigError: regime is not critical
        ConvergenceError: as radial_solve
    """
    if params.regime != Regime.CRITICAL:
        raise ConfigError(f"radial_eigen needs p = q, got p={params.p}, q={params.q}")
    _check_disk(params, R)
    base = params.with_eps(0.0)
    d = params.d

    def shoot(lam: float) -> _Shot:
        return _shoot(_rhs_function(base, lam), -1.0, R, d, rtol, atol)[0]

    lam, _, iterations = _bisect(shoot, 1.0, over_below=False, label="eigenvalue")
    r, u, du, A, r0, sol, boundary = _sample(
        _rhs_function(base, lam), -1.0, R, d, rtol, atol, samples
    )
    logger.info(f"Radial eigenvalue: lambda={lam:.12g}, u(R)={boundary:.3e}")
    return RadialProfile(
        r=r, u=u, du=du, m=1.0, R=R, boundary_value=boundary, lam=lam,
        iterations=iterations, r0=r0, A=A, sol=sol,
    )


def paraboloid(grid: Grid, R: float = 1.0) -> ScalarField:
    """(|x|^2 - R^2) / 2: the exact solution for p = 1, q = n, g = 1 on the disk of radius R."""
    return ScalarField.from_function(grid, lambda x: 0.5 * (np.sum(x**2, axis=1) - R * R))


def exponent_from_profile(
    profile: RadialProfile, window: Optional[Tuple[float, float]] = None
) -> Dict[str, Any]:
    """
    Least-squares slope of log|u| against log(R - r) on a window of boundary distances.

    The default window [1e-3 R, 3e-2 R] is sampled at 64 log-spaced distances
    through the dense interpolant.
    """
    lo, hi = window if window is not None else (1e-3 * profile.R, 3e-2 * profile.R)
    if not 0 < lo < hi < profile.R:
        raise ConfigError(f"invalid profile window [{lo}, {hi}] for R={profile.R}")
    dist = np.geomspace(lo, hi, 64)
    u, _ = profile.evaluate(profile.R - dist)
    x, y = np.log(dist), np.log(np.abs(u))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    r2 = 1.0 - np.sum((y - fitted) ** 2) / np.sum((y - y.mean()) ** 2)
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "r2": float(r2),
        "window": [float(lo), float(hi)],
        "samples": int(dist.size),
        "probe": {"kind": "radial_profile", "R": profile.R},
    }


def profile_Vq(profile: RadialProfile, params: ProblemParams) -> float:
    """
    V_q of the radial solution through the equation itself:
    rho^(q-n) det D^2 u = g (eps - u)^(p-1), so V_q = (1/q) int (-u) g (eps - u)^(p-1) dx.
    """
    d = params.d
    g = _radial_density(params)
    sphere = 2.0 if d == 1 else 2.0 * np.pi

    def integrand(r: float) -> float:
        u, _ = profile.evaluate(np.array([r]))
        return -u[0] * g(r) * (params.eps - u[0]) ** (params.p - 1.0) * r ** (d - 1)

    value, _err = quad(integrand, 0.0, profile.R, limit=200, epsabs=1e-13)
    return float(sphere * value / params.q)
