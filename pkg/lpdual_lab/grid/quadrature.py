"""
Midpoint quadrature with cut cells.

Each lattice node owns the cell of side dx centred on it. Cells whose corners
all lie in the domain are full; for the others the area and centroid of
cell ∩ U come from Gauss-Legendre vertical chords, split at the points where
the boundary crosses the cell's top and bottom edges.
"""
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Tuple, Union

import numpy as np

if TYPE_CHECKING:
    from .lattice import Grid

GAUSS_ORDER = 8
EDGE_SAMPLES = 9
INTERVAL_BISECTION_ITERS = 44

Integrand = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]
Trace = Union[float, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True, eq=False)
class CellQuadrature:
    """
    Cells with non-empty intersection with the domain.

    ``node`` is the interior-node index owning the cell, or -1 for cells of
    boundary, demoted and exterior lattice nodes.
    """
    areas: np.ndarray
    centroids: np.ndarray
    node: np.ndarray

    @property
    def total_area(self) -> float:
        return float(np.sum(self.areas))

    @property
    def interior_mask(self) -> np.ndarray:
        return self.node >= 0


def _segment_inside_interval(
    a: np.ndarray,
    b: np.ndarray,
    contains: Callable[[np.ndarray], np.ndarray],
    samples: int = EDGE_SAMPLES,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Parameter interval [t0, t1] of the segments a -> b lying inside a convex set.

    Returns:
        (t0, t1, nonempty); intervals missed by every sample count as empty
    """
    K, dim = a.shape
    ts = np.linspace(0.0, 1.0, samples)
    seg = b - a
    pts = a[:, None, :] + ts[None, :, None] * seg[:, None, :]
    inside = contains(pts.reshape(-1, dim)).reshape(K, samples)
    nonempty = inside.any(axis=1)
    first = np.argmax(inside, axis=1)
    last = samples - 1 - np.argmax(inside[:, ::-1], axis=1)
    t0 = ts[first].copy()
    t1 = ts[last].copy()

    low = np.flatnonzero(nonempty & (first > 0))
    if low.size:
        t_out, t_in = ts[first[low] - 1], ts[first[low]]
        for _ in range(INTERVAL_BISECTION_ITERS):
            mid = 0.5 * (t_out + t_in)
            ins = contains(a[low] + mid[:, None] * seg[low])
            t_in = np.where(ins, mid, t_in)
            t_out = np.where(ins, t_out, mid)
        t0[low] = 0.5 * (t_out + t_in)
    high = np.flatnonzero(nonempty & (last < samples - 1))
    if high.size:
        t_in, t_out = ts[last[high]], ts[last[high] + 1]
        for _ in range(INTERVAL_BISECTION_ITERS):
            mid = 0.5 * (t_out + t_in)
            ins = contains(a[high] + mid[:, None] * seg[high])
            t_in = np.where(ins, mid, t_in)
            t_out = np.where(ins, t_out, mid)
        t1[high] = 0.5 * (t_out + t_in)
    return t0, t1, nonempty


def _cut_cells_2d(
    centers: np.ndarray, dx: float, contains: Callable[[np.ndarray], np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    """Area and centroid of cell ∩ U for square cells centred at ``centers``."""
    C = centers.shape[0]
    x0 = centers[:, 0] - 0.5 * dx
    y0 = centers[:, 1] - 0.5 * dx
    y1 = y0 + dx

    breaks = [x0, x0 + dx]
    for y in (y0, y1):
        a = np.stack([x0, y], axis=1)
        b = np.stack([x0 + dx, y], axis=1)
        t0, t1, ok = _segment_inside_interval(a, b, contains)
        breaks.append(np.where(ok, x0 + t0 * dx, x0))
        breaks.append(np.where(ok, x0 + t1 * dx, x0))
    bp = np.sort(np.stack(breaks, axis=1), axis=1)

    xi, wi = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    left, right = bp[:, :-1], bp[:, 1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    xs = (mid[..., None] + half[..., None] * xi).reshape(C, -1)
    ws = (half[..., None] * wi).reshape(C, -1)

    flat_x = xs.ravel()
    rows = np.repeat(np.arange(C), xs.shape[1])
    a = np.stack([flat_x, y0[rows]], axis=1)
    b = np.stack([flat_x, y1[rows]], axis=1)
    t0, t1, ok = _segment_inside_interval(a, b, contains)
    length = np.where(ok, (t1 - t0) * dx, 0.0).reshape(C, -1)
    ymid = (y0[rows] + 0.5 * (t0 + t1) * dx).reshape(C, -1)

    area = np.sum(ws * length, axis=1)
    safe = np.where(area > 0, area, 1.0)
    cx = np.sum(ws * length * xs, axis=1) / safe
    cy = np.sum(ws * length * ymid, axis=1) / safe
    return area, np.stack([cx, cy], axis=1)


def build_quadrature(grid: "Grid") -> CellQuadrature:
    dx = grid.dx
    centers = grid.lattice_points
    node = grid.index.ravel()

    if grid.dim == 1:
        lo, hi = grid.domain.bounding_box
        left = np.maximum(centers[:, 0] - 0.5 * dx, lo[0])
        right = np.minimum(centers[:, 0] + 0.5 * dx, hi[0])
        areas = np.clip(right - left, 0.0, None)
        centroids = (0.5 * (left + right))[:, None]
        keep = areas > 0
        return CellQuadrature(areas=areas[keep], centroids=centroids[keep], node=node[keep])

    corners = np.array([[-0.5, -0.5], [0.5, -0.5], [-0.5, 0.5], [0.5, 0.5]]) * dx
    corner_in = np.stack(
        [grid.domain.contains(centers + c) for c in corners], axis=1
    ).all(axis=1)

    areas = np.where(corner_in, dx * dx, 0.0)
    centroids = centers.copy()
    cut = np.flatnonzero(~corner_in)
    if cut.size:
        cut_area, cut_centroid = _cut_cells_2d(centers[cut], dx, grid.domain.contains)
        areas[cut] = cut_area
        centroids[cut] = cut_centroid
    keep = areas > 0
    return CellQuadrature(areas=areas[keep], centroids=centroids[keep], node=node[keep])


def integrate(grid: "Grid", w: Integrand, boundary_trace: Trace = 0.0) -> float:
    """
    Integral over the domain.

    Args:
        grid: the grid
        w: values at interior nodes (midpoint rule on each node's cell) or a
            callable evaluated at every cell centroid
        boundary_trace: value used on cells not owned by an interior node, a
            constant or a callable of the centroids; ignored for callable w

    Returns:
        The quadrature sum, accumulated in a fixed order
    """
    quad = grid.quadrature
    if callable(w):
        return float(np.dot(quad.areas, np.asarray(w(quad.centroids), dtype=float)))
    values = np.asarray(w, dtype=float)
    own = quad.interior_mask
    total = float(np.dot(quad.areas[own], values[quad.node[own]]))
    if callable(boundary_trace):
        trace = np.asarray(boundary_trace(quad.centroids[~own]), dtype=float)
        total += float(np.dot(quad.areas[~own], trace))
    elif boundary_trace != 0.0:
        total += float(boundary_trace) * float(np.sum(quad.areas[~own]))
    return total


def node_weights(grid: "Grid") -> np.ndarray:
    """Area of each interior node's cell ∩ U, in node order."""
    quad = grid.quadrature
    own = quad.interior_mask
    weights = np.zeros(grid.size)
    weights[quad.node[own]] = quad.areas[own]
    return weights
