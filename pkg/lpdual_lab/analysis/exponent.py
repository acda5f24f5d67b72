"""
Boundary Hoelder-exponent fits: log|u| against log dist(x, boundary).
"""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from ..core.config import MIN_FIT_SAMPLES, WINDOW_MAX_DIAM, WINDOW_MIN_CELLS
from ..core.error import ConfigError, GridError
from ..core.logger import get_logger
from ..grid.field import ScalarField
from ..grid.io import write_table
from ..grid.lattice import Grid
from ..models.schema import ExponentFitReport

logger = get_logger(__name__)

WINDOW_SLACK = 1e-9
SPLIT_TOL = 0.05
SPLIT_MIN_R2 = 0.999
SPLIT_MIN_SAMPLES = 3
CORNER_FACTOR = 2.0

Window = Tuple[float, float]


@dataclass(frozen=True)
class RayProbe:
    """
    Nodes within half a cell of the inward ray from a boundary point.

    point/direction default to the flat face of a cusp domain, otherwise to
    the boundary point in direction (1, 0) and its inward normal.
    """
    point: Optional[Tuple[float, ...]] = None
    direction: Optional[Tuple[float, ...]] = None

    def resolve(self, grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
        domain = grid.domain
        if self.point is not None:
            z0 = np.asarray(self.point, dtype=float)
        elif domain.kind == "cusp":
            z0 = np.zeros(2)
        else:
            z0 = domain.boundary_point(np.eye(grid.dim)[:1])[0]
        if self.direction is not None:
            e = np.asarray(self.direction, dtype=float)
        elif domain.kind == "cusp" and self.point is None:
            e = np.array([0.0, 1.0])
        elif grid.dim == 1:
            e = np.sign(domain.interior_point - z0)
        else:
            e = domain.inward_normal(z0)
        e = e / np.linalg.norm(e)
        if domain.kind == "polygon":
            verts = np.asarray(domain.vertices, dtype=float)
            if np.min(np.linalg.norm(verts - z0, axis=1)) <= grid.dx:
                raise ConfigError("ray probes at polygon corners are excluded")
        return z0, e

    def select(self, grid: Grid) -> np.ndarray:
        z0, e = self.resolve(grid)
        rel = grid.points - z0
        along = rel @ e
        perp = np.linalg.norm(rel - along[:, None] * e, axis=1)
        return (along > 0) & (perp <= 0.5 * grid.dx + 1e-12)

    def describe(self, grid: Grid) -> Dict[str, Any]:
        z0, e = self.resolve(grid)
        return {"kind": "ray", "point": z0.tolist(), "direction": e.tolist()}


@dataclass(frozen=True)
class ScatterProbe:
    """All interior nodes; on polygons nodes dominated by a corner are dropped."""

    def select(self, grid: Grid) -> np.ndarray:
        mask = np.ones(grid.size, dtype=bool)
        if grid.domain.kind == "polygon":
            verts = np.asarray(grid.domain.vertices, dtype=float)
            to_corner = np.min(
                np.linalg.norm(grid.points[:, None, :] - verts[None, :, :], axis=2), axis=1
            )
            mask &= to_corner >= CORNER_FACTOR * grid.boundary_distance
        return mask

    def describe(self, grid: Grid) -> Dict[str, Any]:
        return {"kind": "scatter"}


Probe = Union[RayProbe, ScatterProbe]


def default_window(grid: Grid) -> Window:
    return WINDOW_MIN_CELLS * grid.dx, WINDOW_MAX_DIAM * grid.domain.diameter


def fit_samples(
    u: ScalarField, probe: Optional[Probe] = None, window: Optional[Window] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Boundary distances and |u| of the probe nodes inside the window."""
    grid = u.grid
    probe = probe if probe is not None else RayProbe()
    lo, hi = window if window is not None else default_window(grid)
    if lo < WINDOW_MIN_CELLS * grid.dx * (1.0 - WINDOW_SLACK) or lo >= hi:
        raise ConfigError(
            f"fit window [{lo:.4g}, {hi:.4g}] must start at >= {WINDOW_MIN_CELLS} dx "
            f"= {WINDOW_MIN_CELLS * grid.dx:.4g}"
        )
    dist = grid.boundary_distance
    mask = probe.select(grid)
    mask &= (dist >= lo * (1.0 - WINDOW_SLACK)) & (dist <= hi * (1.0 + WINDOW_SLACK))
    mask &= np.abs(u.values) > 0
    return dist[mask], np.abs(u.values[mask])


def _linear_fit(d: np.ndarray, abs_u: np.ndarray) -> Tuple[float, float, float]:
    fit = stats.linregress(np.log(d), np.log(abs_u))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)


def fit_boundary_exponent(
    u: ScalarField,
    probe: Optional[Probe] = None,
    window: Optional[Window] = None,
    min_samples: int = MIN_FIT_SAMPLES,
) -> ExponentFitReport:
    """
    Least-squares slope of log|u| against log dist(x, boundary) on the window.

    Raises:
        GridError: fewer than min_samples nodes in the window; refine the grid
    """
    probe = probe if probe is not None else RayProbe()
    lo, hi = window if window is not None else default_window(u.grid)
    d, abs_u = fit_samples(u, probe, (lo, hi))
    if d.size < min_samples:
        raise GridError(
            f"only {d.size} nodes in the fit window [{lo:.4g}, {hi:.4g}]; "
            f"refine the grid (N={u.grid.N}) to get at least {min_samples}",
            details={"samples": int(d.size), "N": u.grid.N},
        )
    slope, intercept, r2 = _linear_fit(d, abs_u)
    logger.debug(f"Exponent fit: slope={slope:.4f}, R^2={r2:.5f}, {d.size} samples")
    return {
        "slope": slope,
        "intercept": intercept,
        "r2": r2,
        "window": [float(lo), float(hi)],
        "samples": int(d.size),
        "probe": probe.describe(u.grid),
    }


def split_window_check(
    u: ScalarField,
    probe: Optional[Probe] = None,
    window: Optional[Window] = None,
    tol: float = SPLIT_TOL,
) -> Dict[str, Any]:
    """
    Fit the two halves of the window (split at its geometric midpoint) separately.

    The comparison is binding only when the full-window fit has R^2 >= 0.999.
    """
    lo, hi = window if window is not None else default_window(u.grid)
    full = fit_boundary_exponent(u, probe, (lo, hi))
    mid = math.sqrt(lo * hi)
    lower = fit_boundary_exponent(u, probe, (lo, mid), min_samples=SPLIT_MIN_SAMPLES)
    upper = fit_boundary_exponent(u, probe, (mid, hi), min_samples=SPLIT_MIN_SAMPLES)
    difference = abs(lower["slope"] - upper["slope"])
    binding = full["r2"] >= SPLIT_MIN_R2
    return {
        "full": full,
        "lower": lower,
        "upper": upper,
        "difference": difference,
        "binding": binding,
        "passed": (not binding) or difference <= tol,
    }


def band_check(fit: ExponentFitReport, band: Tuple[float, float], min_r2: float = 0.0) -> bool:
    return bool(band[0] <= fit["slope"] <= band[1] and fit["r2"] >= min_r2)


def write_fit_profile(
    u: ScalarField,
    path: Union[str, Path],
    probe: Optional[Probe] = None,
    window: Optional[Window] = None,
) -> Path:
    """'d,abs_u' rows of the fitted samples, sorted by distance."""
    d, abs_u = fit_samples(u, probe, window)
    order = np.argsort(d, kind="stable")
    return write_table(pd.DataFrame({"d": d[order], "abs_u": abs_u[order]}), path)
