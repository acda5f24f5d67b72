from typing import Any, Dict, List, Optional, TypedDict


class SolveReport(TypedDict, total=False):
    """
    Outcome of one Newton solve, flow run or eigen iteration.

    - residual: L-infinity norm of log det D^2 u - log RHS at the returned field
    - status: "converged", "max_iters", "line_search_failed", "stalled" or "t_max"
    - wall_time is moved to timing.json by the runner so reports stay reproducible
    """
    converged: bool
    status: str
    residual: float
    iterations: int
    convexity_violations: int
    functionals: Dict[str, float]
    wall_time: float


class FunctionalReport(TypedDict, total=False):
    V_q: float
    J_eps: Optional[float]
    I_eps: Optional[float]
    J_F: Optional[float]
    I_0: float
    rayleigh: Optional[float]
    parameters: Dict[str, Any]


class FlowHistoryRow(TypedDict):
    t: float
    J_eps: float
    sup_grad: float
    sup_ut: float
    min_u: float
    residual: float
    convexity_violations: int


class ExponentFitReport(TypedDict, total=False):
    slope: float
    intercept: float
    r2: float
    window: List[float]
    samples: int
    probe: Dict[str, Any]


class CertificateSummary(TypedDict, total=False):
    family: str
    passed: bool
    C: float
    a: float
    b: Optional[float]
    nodes: int
    failed_nodes: int
    worst_margin: float
    worst_node: Optional[int]
    worst_point: Optional[List[float]]
    doublings: int


class PropertyVerdict(TypedDict, total=False):
    name: str
    passed: bool
    value: Optional[float]
    threshold: Optional[float]
    detail: str


class RunReport(TypedDict):
    schema_version: str
    subcommand: str
    config: Dict[str, Any]
    grid: Dict[str, Any]
    results: Dict[str, Any]
    properties: List[PropertyVerdict]
    passed: bool
    exit_code: int
    error: Optional[Dict[str, Any]]


def build_solve_report(
    *,
    converged: bool,
    status: str,
    residual: float,
    iterations: int,
    convexity_violations: int,
    functionals: Optional[Dict[str, float]] = None,
    wall_time: float = 0.0,
) -> SolveReport:
    return {
        "converged": bool(converged),
        "status": status,
        "residual": float(residual),
        "iterations": int(iterations),
        "convexity_violations": int(convexity_violations),
        "functionals": dict(functionals or {}),
        "wall_time": float(wall_time),
    }


def build_property(
    name: str,
    passed: bool,
    *,
    value: Optional[float] = None,
    threshold: Optional[float] = None,
    detail: str = "",
) -> PropertyVerdict:
    return {
        "name": name,
        "passed": bool(passed),
        "value": None if value is None else float(value),
        "threshold": None if threshold is None else float(threshold),
        "detail": detail,
    }


def build_run_report(
    *,
    schema_version: str,
    subcommand: str,
    config: Dict[str, Any],
    grid: Dict[str, Any],
    results: Dict[str, Any],
    properties: List[PropertyVerdict],
    exit_code: int,
    error: Optional[Dict[str, Any]] = None,
) -> RunReport:
    return {
        "schema_version": schema_version,
        "subcommand": subcommand,
        "config": config,
        "grid": grid,
        "results": results,
        "properties": properties,
        "passed": all(p["passed"] for p in properties) and error is None,
        "exit_code": exit_code,
        "error": error,
    }
