"""
Node-wise certification of barrier inequalities, calibration of their constant,
and the comparison checks built on them.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..core.config import DEFAULT_MAX_DOUBLINGS, DEFAULT_TOL_CMP
from ..core.error import CalibrationError, ConfigError
from ..core.logger import get_logger
from ..grid.field import ScalarField
from ..grid.io import write_table
from ..grid.lattice import Grid
from ..grid.operators import derived_from_values
from ..models.params import ProblemParams
from ..models.schema import CertificateSummary
from .families import BarrierSpec, make_subsolution

logger = get_logger(__name__)

BOUNDARY_SAMPLES = 256
FD_STEP = 1e-3
FD_MIN_HEIGHT = 0.2
FD_TOL = 1e-6
IDENTITY_TOL = 1e-10
GRID_MIN_HEIGHT = 0.5
GRID_TOL = 1e-2
BOUNDARY_TOL = 1e-10
MIN_WINDOW_NODES = 5

CERTIFICATE_COLUMNS = ["node_index", "x1", "x2", "margin"]


@dataclass(frozen=True, eq=False)
class Certificate:
    """
    Margins of one barrier at the interior nodes of a grid.

    Subsolution margin: LHS / g - 1; supersolution margin: 1 - LHS / g. A node
    passes when its margin is >= 0; supersolution nodes with w >= 0 (outside
    the literal cusp region) pass with margin +inf.
    """
    spec: BarrierSpec
    points: np.ndarray
    margins: np.ndarray
    boundary_ok: bool
    doublings: int = 0

    @property
    def passed_nodes(self) -> np.ndarray:
        return self.margins >= 0

    @property
    def passed(self) -> bool:
        return bool(np.all(self.passed_nodes) and self.boundary_ok)

    @property
    def worst_node(self) -> int:
        return int(np.argmin(self.margins))

    def summary(self) -> CertificateSummary:
        k = self.worst_node
        return {
            "family": self.spec.family,
            "passed": self.passed,
            "C": self.spec.C,
            "a": self.spec.a,
            "b": self.spec.b,
            "nodes": int(self.margins.size),
            "failed_nodes": int(np.sum(~self.passed_nodes)),
            "worst_margin": float(self.margins[k]),
            "worst_node": k,
            "worst_point": self.points[k].tolist(),
            "doublings": self.doublings,
        }

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "node_index": np.arange(self.margins.size),
            "x1": self.points[:, 0],
            "x2": self.points[:, 1],
            "margin": self.margins,
        })


def write_certificate(cert: Certificate, path: Union[str, Path]) -> Path:
    return write_table(cert.frame(), path, CERTIFICATE_COLUMNS)


def _boundary_ok(spec: BarrierSpec) -> bool:
    """v <= 0 on the domain boundary; w = 0 on both pieces of the cusp boundary."""
    if spec.family == "subsolution_v_a":
        pts = spec.domain.sample_boundary(BOUNDARY_SAMPLES)
        return bool(np.all(spec.value(pts) <= BOUNDARY_TOL))
    pts = spec.domain.literal_boundary_samples(BOUNDARY_SAMPLES)
    return bool(np.all(np.abs(spec.value(pts)) <= BOUNDARY_TOL * max(1.0, spec.C)))


def verify_inequality(
    spec: BarrierSpec, params: ProblemParams, grid: Grid, *, doublings: int = 0
) -> Certificate:
    """
    Evaluate the barrier inequality with closed-form derivatives at every interior node.

    The subsolution is tested against the eps = 0 equation, which makes it a
    subsolution for every eps > 0 as well; the supersolution against the
    equation with the eps of params.
    """
    points = grid.points
    g = params.g(points)
    if spec.family == "subsolution_v_a":
        lhs = spec.lhs(points, eps=0.0)
        margins = np.where(np.isfinite(lhs), lhs / g - 1.0, -1.0)
    else:
        lhs = spec.lhs(points, eps=params.eps)
        outside = (spec.value(points) >= 0) | np.isnan(lhs)
        margins = np.where(outside, np.inf, 1.0 - np.nan_to_num(lhs) / g)
    return Certificate(
        spec=spec,
        points=points,
        margins=margins,
        boundary_ok=_boundary_ok(spec),
        doublings=doublings,
    )


def calibrate(
    spec: BarrierSpec,
    params: ProblemParams,
    grid: Grid,
    max_doublings: int = DEFAULT_MAX_DOUBLINGS,
) -> Tuple[BarrierSpec, Certificate]:
    """
    Double C (subsolution) or halve it (supersolution) until the certificate passes.

    Raises:
        CalibrationError: no certificate within max_doublings, with the worst node
    """
    factor = 2.0 if spec.family == "subsolution_v_a" else 0.5
    current = spec
    for k in range(max_doublings + 1):
        cert = verify_inequality(current, params, grid, doublings=k)
        if cert.passed:
            logger.info(
                f"Calibrated {spec.family}: C={current.C:.6g} after {k} steps "
                f"(worst margin {cert.summary()['worst_margin']:.3e})"
            )
            return current, cert
        logger.debug(
            f"{spec.family}: C={current.C:.6g} fails at {cert.summary()['failed_nodes']} nodes"
        )
        current = current.with_C(current.C * factor)
    summary = cert.summary()
    raise CalibrationError(
        f"{spec.family} not certified after {max_doublings} steps",
        details={
            "worst_margin": summary["worst_margin"],
            "worst_point": summary["worst_point"],
            "C": summary["C"],
        },
    )


def _det_scale(det: np.ndarray) -> np.ndarray:
    """|det|, floored at 1e-3 of its maximum where the determinant changes sign."""
    if det.size == 0:
        return det
    return np.maximum(np.abs(det), 1e-3 * np.max(np.abs(det)))


def _richardson(diff: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    """(4 D(h/2) - D(h)) / 3 for a second-order central difference D."""
    return (4.0 * diff(0.5 * h) - diff(h)) / 3.0


def fd_cross_check(
    spec: BarrierSpec,
    grid: Grid,
    h: float = FD_STEP,
    min_height: float = FD_MIN_HEIGHT,
) -> Dict[str, Any]:
    """
    Closed-form derivatives against Richardson-extrapolated central differences.

    The gradient is differenced from values, the Hessian from the closed-form
    gradient, so the roundoff of either stays at eps_mach / h. Only nodes with
    frame height y2 >= min_height are compared; the det error is relative to
    |det| floored at 1e-3 of its maximum.
    """
    y = spec.local(grid.points)
    pts = grid.points[y[:, 1] >= min_height]
    if pts.shape[0] == 0:
        raise ConfigError("no nodes above the height threshold for the derivative check")
    unit = np.eye(2)
    grad_cf, hess_cf = spec.derivatives(pts)

    def grad_diff(step: float) -> np.ndarray:
        return np.stack([
            (spec.value(pts + step * unit[i]) - spec.value(pts - step * unit[i])) / (2.0 * step)
            for i in range(2)
        ], axis=1)

    def hess_diff(step: float) -> np.ndarray:
        cols = [
            (spec.derivatives(pts + step * unit[j])[0] - spec.derivatives(pts - step * unit[j])[0])
            / (2.0 * step)
            for j in range(2)
        ]
        return np.stack(cols, axis=2)

    grad_fd = _richardson(grad_diff, h)
    hess_fd = _richardson(hess_diff, h)
    hess_fd = 0.5 * (hess_fd + np.transpose(hess_fd, (0, 2, 1)))

    grad_norm = np.linalg.norm(grad_cf, axis=1)
    grad_scale = np.maximum(grad_norm, 1e-3 * grad_norm.max())
    grad_rel = np.linalg.norm(grad_fd - grad_cf, axis=1) / grad_scale
    det_fd = np.linalg.det(hess_fd)
    det_cf = spec.det_closed_form(pts)
    scale = _det_scale(det_cf)
    rel = np.abs(det_fd - det_cf) / scale
    identity = np.abs(np.linalg.det(hess_cf) - det_cf) / scale
    return {
        "nodes": int(pts.shape[0]),
        "step": h,
        "max_gradient_error": float(grad_rel.max()),
        "max_relative_error": float(rel.max()),
        "max_identity_error": float(identity.max()),
        "passed": bool(
            grad_rel.max() <= FD_TOL and rel.max() <= FD_TOL and identity.max() <= IDENTITY_TOL
        ),
    }


def grid_cross_check(
    spec: BarrierSpec,
    grid: Grid,
    min_height: float = GRID_MIN_HEIGHT,
    tol: float = GRID_TOL,
) -> Dict[str, Any]:
    """Closed-form det against the grid operators at regular nodes with y2 >= min_height."""
    dq = derived_from_values(grid, spec.value(grid.points), spec.value)
    y = spec.local(grid.points)
    mask = grid.regular & (y[:, 1] >= min_height)
    det_cf = spec.det_closed_form(grid.points[mask])
    rel = np.abs(dq.det[mask] - det_cf) / _det_scale(det_cf)
    worst = float(rel.max()) if rel.size else 0.0
    return {"nodes": int(mask.sum()), "max_relative_error": worst, "passed": worst <= tol}


def comparison_check(
    u: ScalarField, v: ScalarField, tol: float = DEFAULT_TOL_CMP, roles: str = "u >= v"
) -> Dict[str, Any]:
    """u >= v - tol at every interior node."""
    gap = u.values - v.values
    k = int(np.argmin(gap))
    return {
        "roles": roles,
        "passed": bool(gap[k] >= -tol),
        "min_gap": float(gap[k]),
        "worst_node": k,
        "worst_point": u.points[k].tolist(),
    }


def upper_bound_check(
    u: ScalarField,
    params: ProblemParams,
    grid: Grid,
    boundary_points: Optional[np.ndarray] = None,
    samples: int = 4,
    tol: float = DEFAULT_TOL_CMP,
) -> Dict[str, Any]:
    """
    Calibrate v_a at boundary points, compare u >= v_a, then test
    |u| <= C_fit dist(x, boundary)^a at every node with C_fit the largest constant.
    """
    if boundary_points is None:
        boundary_points = grid.domain.sample_boundary(samples)
    boundary_points = np.atleast_2d(boundary_points)
    comparisons = []
    constants = []
    a = None
    for z0 in boundary_points:
        spec, cert = calibrate(make_subsolution(params, grid.domain, z0), params, grid)
        a = spec.a
        constants.append(spec.C)
        v = ScalarField(grid, spec.value(grid.points))
        cmp = comparison_check(u, v, tol, roles="u >= v_a")
        cmp["z0"] = z0.tolist()
        cmp["C"] = spec.C
        comparisons.append(cmp)
    C_fit = max(constants)
    bound = C_fit * grid.boundary_distance**a
    excess = np.abs(u.values) - bound
    k = int(np.argmax(excess))
    return {
        "a": a,
        "C_fit": C_fit,
        "comparisons": comparisons,
        "comparison_passed": all(c["passed"] for c in comparisons),
        "max_excess": float(excess[k]),
        "worst_point": grid.points[k].tolist(),
        "passed": bool(excess[k] <= tol),
    }


def cusp_lower_bound_check(
    u: ScalarField,
    spec: BarrierSpec,
    window: Tuple[float, float],
    tol: float = DEFAULT_TOL_CMP,
    min_nodes: int = MIN_WINDOW_NODES,
) -> Dict[str, Any]:
    """
    On the axis x1 = 0 inside the window: |u| >= |w| and |u| >= (C/2) x2^a.

    Both bounds fail when the window holds fewer than ``min_nodes`` axis nodes.
    ``half_constant_threshold`` is the height 2^(-1/(1-a)) below which w itself
    satisfies the second bound.
    """
    if spec.family != "supersolution_w":
        raise ConfigError("the cusp lower bound uses the supersolution")
    pts = u.points
    axis = np.abs(pts[:, 0]) <= 1e-12
    if not axis.any():
        raise ConfigError("no grid nodes on the axis x1 = 0; use an odd N")
    x2 = pts[:, 1]
    w = spec.value(pts)
    in_window = axis & (x2 >= window[0]) & (x2 <= window[1])
    covered = int(in_window.sum()) >= min_nodes
    if not covered:
        logger.warning(
            f"Axis window {window} holds {int(in_window.sum())} nodes, fewer than {min_nodes}"
        )
    gap = np.abs(u.values[in_window]) - np.abs(w[in_window])
    half = np.abs(u.values[in_window]) - 0.5 * spec.C * x2[in_window] ** spec.a
    return {
        "window": [float(window[0]), float(window[1])],
        "window_nodes": int(in_window.sum()),
        "min_window_nodes": min_nodes,
        "min_gap_w": float(gap.min()) if gap.size else None,
        "dominates_w": bool(covered and gap.min() >= -tol),
        "half_constant_threshold": 2.0 ** (-1.0 / (1.0 - spec.a)),
        "min_gap_half_constant": float(half.min()) if half.size else None,
        "half_constant": bool(covered and half.min() >= -tol),
    }
