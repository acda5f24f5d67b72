"""
Gradient flow

    u_t = sqrt(1 + |x|^2) (log det D^2 u - log RHS(x, u, Du)),  u = 0 on the boundary,

with steps accepted only when the energy of the right-hand side does not rise.
The linearized scheme is backward Euler with the residual linearized at the
current field; the explicit scheme is forward Euler. Both share the acceptance
rule, so the energy is monotone for either.
"""
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from ..core.config import (
    DEFAULT_TOL_DESCENT,
    DT_GROWTH,
    DT_INIT_FACTOR,
    DT_MAX_FACTOR,
    DT_MIN,
    EIGEN_CLAMP,
)
from ..core.error import ConfigError, ConvergenceError, DomainError
from ..core.logger import get_logger
from ..functionals.energy import integral_to_zero
from ..grid.field import ScalarField
from ..grid.io import write_table
from ..grid.operators import DerivedQuantities
from ..models.params import FlowSettings, ProblemParams, Tolerances
from ..models.regime import Regime
from ..models.schema import FlowHistoryRow, SolveReport, build_solve_report
from .newton import jacobian
from .rhs import DualMinkowskiRHS, GeneralFRHS, RightHandSide, evaluate

logger = get_logger(__name__)

HISTORY_COLUMNS = ["t", "J_eps", "sup_grad", "sup_ut", "min_u", "residual"]
CHECKPOINT_FRACTION = 0.01
MONITOR_FACTOR = 10.0
NON_COLLAPSE_FACTOR = 0.5
RHO_SLACK = 0.9
SCHEMES = ("linearized", "explicit")


@dataclass(frozen=True, eq=False)
class FlowState:
    """
    One point of a flow run.

    history holds one row per accepted step, the initial state included, and
    is shared by the states of one run;
    ut_max and ut_min are the signed extremes of u_t, rho_margin the ratio
    min rho^2 / (0.9 ||u / sqrt(1+|x|^2)||)^2, one entry per row.
    """
    u: ScalarField
    dq: DerivedQuantities
    residual: np.ndarray
    energy: float
    violations: int
    t: float
    dt: float
    steps: int = 0
    rejected: int = 0
    history: List[FlowHistoryRow] = field(default_factory=list)
    ut_max: List[float] = field(default_factory=list)
    ut_min: List[float] = field(default_factory=list)
    rho_margin: List[float] = field(default_factory=list)
    monitors: Dict[str, Any] = field(default_factory=dict)

    @property
    def speed(self) -> np.ndarray:
        return np.sqrt(1.0 + np.sum(self.u.points**2, axis=1))

    @property
    def ut(self) -> np.ndarray:
        return self.speed * self.residual

    @property
    def sup_ut(self) -> float:
        return float(np.max(np.abs(self.ut)))


def _energy(rhs: RightHandSide, u: ScalarField, dq: DerivedQuantities) -> float:
    energy = getattr(rhs, "energy", None)
    if energy is None:
        raise ConfigError(f"right-hand side '{rhs.name}' has no energy to descend")
    return float(energy(u, dq))


def _rho_margin(u: ScalarField, dq: DerivedQuantities) -> float:
    speed = np.sqrt(1.0 + np.sum(u.points**2, axis=1))
    target = (RHO_SLACK * np.max(np.abs(u.values) / speed)) ** 2
    return float(np.min(dq.rho2) / target)


def _record(state: FlowState) -> None:
    ut = state.ut
    state.history.append({
        "t": state.t,
        "J_eps": state.energy,
        "sup_grad": state.dq.sup_grad,
        "sup_ut": float(np.max(np.abs(ut))),
        "min_u": state.u.min_value,
        "residual": float(np.max(np.abs(state.residual))),
        "convexity_violations": state.violations,
    })
    state.ut_max.append(float(ut.max()))
    state.ut_min.append(float(ut.min()))
    state.rho_margin.append(_rho_margin(state.u, state.dq))


def _check_scheme(scheme: str) -> None:
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown flow scheme '{scheme}'; expected one of {list(SCHEMES)}")


def initial_dt(
    rhs: RightHandSide,
    u: ScalarField,
    dq: DerivedQuantities,
    clamp: float,
    scheme: str = "linearized",
) -> float:
    """
    Explicit: 0.1 / max over nodes of sqrt(1+|x|^2) |diag of the linearized operator|.
    Linearized: 0.1 dx^2, independent of the boundary offsets.
    """
    if scheme == "linearized":
        return DT_INIT_FACTOR * u.grid.dx**2
    diag = np.abs(jacobian(rhs, u, dq, clamp).diagonal())
    speed = np.sqrt(1.0 + np.sum(u.points**2, axis=1))
    return DT_INIT_FACTOR / float(np.max(speed * diag))


def start_flow(
    rhs: RightHandSide,
    u0: ScalarField,
    tolerances: Optional[Tolerances] = None,
    clamp: float = EIGEN_CLAMP,
    scheme: str = "linearized",
) -> FlowState:
    """
    Raises:
        ConfigError: unknown scheme
        DomainError: u0 is not admissible
    """
    _check_scheme(scheme)
    tol = tolerances or Tolerances()
    state = evaluate(rhs, u0.values, u0.grid, clamp)
    if state is None:
        raise DomainError("initial field of the flow is not admissible")
    u, dq, R = state
    flow = FlowState(
        u=u,
        dq=dq,
        residual=R,
        energy=_energy(rhs, u, dq),
        violations=dq.convexity_violations(tol.convex),
        t=0.0,
        dt=initial_dt(rhs, u, dq, clamp, scheme),
    )
    _record(flow)
    return flow


def _increment(
    state: FlowState, rhs: RightHandSide, scheme: str, clamp: float
) -> Callable[[float], np.ndarray]:
    """dt -> update of u: dt u_t, or the solution of (I - dt S J) delta = dt u_t."""
    ut = state.ut
    if scheme == "explicit":
        return lambda dt: dt * ut
    SJ = (sparse.diags(state.speed) @ jacobian(rhs, state.u, state.dq, clamp)).tocsc()
    identity = sparse.identity(state.u.grid.size, format="csc")
    return lambda dt: spsolve((identity - dt * SJ).tocsc(), dt * ut)


def flow_step(
    state: FlowState,
    rhs: RightHandSide,
    *,
    dt_max: float,
    tolerances: Optional[Tolerances] = None,
    clamp: float = EIGEN_CLAMP,
    scheme: str = "linearized",
) -> FlowState:
    """
    One accepted time step of the given scheme.

    A trial is accepted when it is admissible, the energy rises by at most
    tol_descent and the number of convexity violations does not grow. Rejected
    trials halve dt; an accepted step lets dt grow by 1.2 up to dt_max. The
    linearized scheme solves one sparse system per trial with the Jacobian of
    the current field, so its stable step does not shrink with the smallest
    boundary offset.

    Raises:
        ConfigError: unknown scheme
        ConvergenceError: dt fell below 1e-14 without an acceptable step
    """
    _check_scheme(scheme)
    tol = tolerances or Tolerances()
    grid = state.u.grid
    increment = _increment(state, rhs, scheme, clamp)
    dt = state.dt
    rejected = state.rejected
    while dt >= DT_MIN:
        trial = evaluate(rhs, state.u.values + increment(dt), grid, clamp)
        if trial is not None:
            u, dq, R = trial
            try:
                energy = _energy(rhs, u, dq)
            except DomainError:
                energy = math.inf
            violations = dq.convexity_violations(tol.convex)
            if energy <= state.energy + tol.descent and violations <= state.violations:
                new = replace(
                    state,
                    u=u,
                    dq=dq,
                    residual=R,
                    energy=energy,
                    violations=violations,
                    t=state.t + dt,
                    dt=min(dt * DT_GROWTH, dt_max),
                    steps=state.steps + 1,
                    rejected=rejected,
                )
                _record(new)
                return new
        dt *= 0.5
        rejected += 1
    raise ConvergenceError(
        "flow stalled: no acceptable step above the minimal time step",
        details={"t": state.t, "dt": dt, "steps": state.steps},
    )


def flow_monitors(state: FlowState, tol_descent: float = DEFAULT_TOL_DESCENT) -> Dict[str, Any]:
    """
    Descent, non-collapse, rho^2 and a priori gradient / u_t checks over a run.

    Values are reported with a pass flag each; the a priori checks compare
    everything after the checkpoint at 1% of the accepted steps with the values
    at the checkpoint.
    """
    energies = np.array([row["J_eps"] for row in state.history])
    rises = np.diff(energies)
    sup_norms = -np.array([row["min_u"] for row in state.history])
    grads = np.array([row["sup_grad"] for row in state.history])
    ut_max = np.array(state.ut_max)
    ut_min = np.array(state.ut_min)
    k = min(len(state.history) - 1, max(1, math.ceil(CHECKPOINT_FRACTION * state.steps)))
    ut_ref = max(abs(ut_max[k]), abs(ut_min[k]))

    monitors: Dict[str, Any] = {
        "max_energy_rise": float(rises.max()) if rises.size else 0.0,
        "descent": bool(rises.size == 0 or rises.max() <= tol_descent),
        "min_sup_norm": float(sup_norms.min()),
        "final_sup_norm": float(sup_norms[-1]),
        "non_collapse": bool(sup_norms.min() >= NON_COLLAPSE_FACTOR * sup_norms[-1]),
        "c0_bound": float(sup_norms.max()),
        "negative": bool(np.all(sup_norms > 0)),
        "min_rho_margin": float(min(state.rho_margin)),
        "rho_lower_bound": bool(min(state.rho_margin) >= 1.0),
        "checkpoint_step": int(k),
        "gradient_bound": bool(np.all(grads[k:] <= MONITOR_FACTOR * grads[k])),
        "ut_bound": bool(
            np.all(ut_max[k:] <= MONITOR_FACTOR * ut_ref)
            and np.all(ut_min[k:] >= -MONITOR_FACTOR * ut_ref)
        ),
    }
    return monitors


def growth_check(
    F: Callable[[np.ndarray], np.ndarray],
    params: ProblemParams,
    u: ScalarField,
    lam: Optional[float] = None,
    samples: int = 64,
) -> Dict[str, Any]:
    """sup over s in [min u, 0) of p int_s^0 F / (-s)^p, compared with lam when given."""
    s = np.linspace(u.min_value, 0.0, samples + 1)[:-1]
    ratio = params.p * integral_to_zero(F, s) / (-s) ** params.p
    out: Dict[str, Any] = {"max_ratio": float(ratio.max()), "lambda": lam}
    out["within"] = None if lam is None else bool(ratio.max() <= lam)
    return out


def flow_rhs(
    params: ProblemParams,
    u0: ScalarField,
    F: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> RightHandSide:
    """Main equation for subcritical runs, g F(u) rho^(n-p) for critical runs with F."""
    if F is not None:
        if params.regime != Regime.CRITICAL:
            raise ConfigError("flows with a general F apply to the critical regime p = q")
        return GeneralFRHS(params, u0.grid, F)
    if params.regime != Regime.SUBCRITICAL:
        raise ConfigError(
            f"flow of the main equation needs the subcritical regime q > p >= 1, "
            f"got {params.regime.value if params.regime else None}"
        )
    return DualMinkowskiRHS(params, u0.grid)


def flow_run(
    params: ProblemParams,
    u0: ScalarField,
    *,
    F: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    settings: Optional[FlowSettings] = None,
    tolerances: Optional[Tolerances] = None,
    lam: Optional[float] = None,
    clamp: float = EIGEN_CLAMP,
) -> Tuple[FlowState, SolveReport]:
    """
    Run the flow until sup|u_t| < tol_steady, t_max or the step cap.

    The explicit scheme caps dt at twice its initial stable step; the
    linearized scheme only at t_max.

    Returns:
        (final state, report); a stall, t_max or the step cap give
        converged=False with the full history kept on the state
    """
    start = time.perf_counter()
    settings = settings or FlowSettings()
    tol = tolerances or Tolerances()
    scheme = settings.scheme
    rhs = flow_rhs(params, u0, F)
    state = start_flow(rhs, u0, tol, clamp, scheme)
    if state.energy >= 0:
        logger.warning(f"Flow starts at non-negative energy {state.energy:.6e}")
    dt_max = DT_MAX_FACTOR * state.dt if scheme == "explicit" else settings.t_max
    status = "max_iters"
    log_every = max(1, settings.max_steps // 50)

    while state.steps < settings.max_steps:
        if state.sup_ut < tol.steady:
            status = "converged"
            break
        if state.t >= settings.t_max:
            status = "t_max"
            break
        try:
            state = flow_step(
                state, rhs, dt_max=dt_max, tolerances=tol, clamp=clamp, scheme=scheme
            )
        except ConvergenceError as e:
            status = "stalled"
            logger.warning(f"Flow stalled at t={state.t:.6e}: {e}")
            break
        if state.steps % log_every == 0:
            logger.info(
                f"Flow step {state.steps}: t={state.t:.5e}, J={state.energy:.10e}, "
                f"sup|u_t|={state.sup_ut:.3e}"
            )
    else:
        if state.sup_ut < tol.steady:
            status = "converged"

    monitors = flow_monitors(state, tol.descent)
    if F is not None:
        monitors["growth"] = growth_check(F, params, state.u, lam)
    state = replace(state, monitors=monitors)
    report = build_solve_report(
        converged=status == "converged",
        status=status,
        residual=float(np.max(np.abs(state.residual))),
        iterations=state.steps,
        convexity_violations=state.violations,
        functionals={"energy": state.energy, "sup_ut": state.sup_ut, "t": state.t},
        wall_time=time.perf_counter() - start,
    )
    log = logger.info if report["converged"] else logger.warning
    log(
        f"Flow ({scheme}) {status} after {state.steps} steps ({state.rejected} rejected), "
        f"t={state.t:.5e}"
    )
    return state, report


def write_history(state: FlowState, path: Union[str, Path]) -> Path:
    """history.csv with columns t,J_eps,sup_grad,sup_ut,min_u,residual."""
    return write_table(state.history, path, HISTORY_COLUMNS)
