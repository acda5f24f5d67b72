"""
Cartesian lattice over a convex domain with exact boundary offsets.

Interior nodes lie strictly inside the domain. Along every stencil direction a
node either sees an interior neighbour (offset 1) or the exact intersection of
the grid line with the boundary at fraction theta in (0, 1] of the step.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Any, Dict, Tuple

import numpy as np
from scipy import ndimage

from ..core.config import MIN_GRID_N
from ..core.error import GridError
from ..core.logger import get_logger
from ..geometry.domain import BaseDomain

if TYPE_CHECKING:
    from .operators import Stencils
    from .quadrature import CellQuadrature

logger = get_logger(__name__)

OFFSET_BISECTION_ITERS = 52

# node classes on the lattice
EXTERIOR = 0
INTERIOR = 1
BOUNDARY_ADJACENT = 2
DEMOTED = 3


def stencil_directions(dim: int) -> np.ndarray:
    """Integer lattice directions: the axes, then both diagonals in the plane."""
    if dim == 1:
        return np.array([[1]])
    if dim == 2:
        return np.array([[1, 0], [0, 1], [1, 1], [1, -1]])
    raise GridError(f"unsupported chart dimension {dim}")


@dataclass(frozen=True, eq=False)
class Grid:
    domain: BaseDomain
    N: int
    min_offset: float
    dx: float
    lo: np.ndarray
    shape: Tuple[int, ...]
    node_class: np.ndarray
    index: np.ndarray
    multi_index: np.ndarray
    points: np.ndarray
    directions: np.ndarray
    neighbor_plus: np.ndarray
    neighbor_minus: np.ndarray
    theta_plus: np.ndarray
    theta_minus: np.ndarray
    boundary_plus: np.ndarray
    boundary_minus: np.ndarray
    boundary_points: np.ndarray

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def step_lengths(self) -> np.ndarray:
        """Euclidean length of one lattice step along each direction."""
        return np.linalg.norm(self.directions, axis=1) * self.dx

    def h_plus(self, k: int) -> np.ndarray:
        return self.theta_plus[k] * self.step_lengths[k]

    def h_minus(self, k: int) -> np.ndarray:
        return self.theta_minus[k] * self.step_lengths[k]

    @cached_property
    def regular(self) -> np.ndarray:
        """Nodes whose full stencil consists of interior nodes."""
        return np.all(self.neighbor_plus >= 0, axis=0) & np.all(self.neighbor_minus >= 0, axis=0)

    @cached_property
    def boundary_distance(self) -> np.ndarray:
        return self.domain.boundary_distance(self.points)

    @cached_property
    def lattice_points(self) -> np.ndarray:
        axes = [self.lo[a] + self.dx * np.arange(self.shape[a]) for a in range(len(self.shape))]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def stencils(self) -> "Stencils":
        from .operators import assemble_stencils

        return assemble_stencils(self)

    @cached_property
    def quadrature(self) -> "CellQuadrature":
        from .quadrature import build_quadrature

        return build_quadrature(self)

    def counts(self) -> Dict[str, int]:
        return {
            "interior": int(np.sum(self.node_class == INTERIOR)),
            "boundary_adjacent": int(np.sum(self.node_class == BOUNDARY_ADJACENT)),
            "demoted": int(np.sum(self.node_class == DEMOTED)),
            "exterior": int(np.sum(self.node_class == EXTERIOR)),
        }

    def describe(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "dx": self.dx,
            "shape": list(self.shape),
            "min_offset": self.min_offset,
            "nodes": self.size,
            "classes": self.counts(),
            "min_theta": float(min(self.theta_plus.min(), self.theta_minus.min())),
        }


def _bisect_offsets(domain: BaseDomain, starts: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Fraction t in (0, 1] where start + t*step leaves the domain; start inside, start+step not."""
    lo = np.zeros(starts.shape[0])
    hi = np.ones(starts.shape[0])
    for _ in range(OFFSET_BISECTION_ITERS):
        mid = 0.5 * (lo + hi)
        inside = domain.contains(starts + mid[:, None] * steps)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return hi


def _lookup(mask: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """mask[idx] with False outside the lattice."""
    shape = np.array(mask.shape)
    valid = np.all((idx >= 0) & (idx < shape), axis=1)
    out = np.zeros(idx.shape[0], dtype=bool)
    out[valid] = mask[tuple(idx[valid].T)]
    return out


def _offsets(
    domain: BaseDomain,
    member: np.ndarray,
    active: np.ndarray,
    lo: np.ndarray,
    dx: float,
    directions: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Offsets and neighbour activity for every active node, direction and side.

    Inactive neighbours that are domain members (demoted nodes) are boundary
    points at offset 1; all others get the bisected intersection.
    """
    idx = np.argwhere(active)
    pts = lo + dx * idx
    K = directions.shape[0]
    theta = np.ones((2, K, idx.shape[0]))
    nb_active = np.zeros((2, K, idx.shape[0]), dtype=bool)
    for side, sign in enumerate((1, -1)):
        for k in range(K):
            step = sign * directions[k]
            nb = idx + step
            nb_active[side, k] = _lookup(active, nb)
            need = ~_lookup(member, nb)
            if np.any(need):
                steps = np.broadcast_to(dx * step.astype(float), (int(need.sum()), idx.shape[1]))
                theta[side, k, need] = _bisect_offsets(domain, pts[need], steps)
    return idx, pts, theta, nb_active


def build_grid(domain: BaseDomain, N: int, min_offset: float = 0.0) -> Grid:
    """
    Build the lattice, its node classification and boundary offsets.

    Args:
        domain: convex chart domain
        N: nodes along the longest side of the bounding box
        min_offset: nodes with some offset below this fraction are demoted to
            boundary nodes carrying the boundary value (1 gives a staircase grid)

    Raises:
        GridError: N too small, empty or disconnected interior
    """
    if N < MIN_GRID_N:
        raise GridError(f"N must be >= {MIN_GRID_N}, got {N}")
    if not 0.0 <= min_offset <= 1.0:
        raise GridError(f"min_offset must lie in [0, 1], got {min_offset}")

    lo, hi = domain.bounding_box
    lo = np.asarray(lo, dtype=float)
    extent = np.asarray(hi, dtype=float) - lo
    dx = float(extent.max()) / (N - 1)
    shape = tuple(int(c) for c in np.ceil(extent / dx - 1e-9).astype(int) + 1)
    dim = len(shape)
    directions = stencil_directions(dim)

    axes = [lo[a] + dx * np.arange(shape[a]) for a in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    lattice = np.stack([m.ravel() for m in mesh], axis=1)
    member = domain.contains(lattice).reshape(shape)
    active = member.copy()

    idx, pts, theta, nb_active = _offsets(domain, member, active, lo, dx, directions)
    demoted = np.zeros(shape, dtype=bool)
    if min_offset > 0 and idx.shape[0] > 0:
        too_close = theta.min(axis=(0, 1)) < min_offset - 1e-9
        if np.any(too_close):
            demoted[tuple(idx[too_close].T)] = True
            active &= ~demoted
            idx, pts, theta, nb_active = _offsets(domain, member, active, lo, dx, directions)
            logger.debug(f"Demoted {int(too_close.sum())} nodes below offset {min_offset}")

    if idx.shape[0] == 0:
        raise GridError(f"Grid at N={N} has no interior nodes", details={"N": N})
    structure = ndimage.generate_binary_structure(dim, 1)
    _labels, components = ndimage.label(active, structure=structure)
    if components != 1:
        raise GridError(
            f"Interior node set is disconnected ({components} components) at N={N}",
            details={"N": N, "components": int(components)},
        )

    M = idx.shape[0]
    index = np.full(shape, -1, dtype=np.int64)
    index[tuple(idx.T)] = np.arange(M)

    K = directions.shape[0]
    neighbors = np.full((2, K, M), -1, dtype=np.int64)
    bnd = np.full((2, K, M), -1, dtype=np.int64)
    boundary_points = []
    count = 0
    for side, sign in enumerate((1, -1)):
        for k in range(K):
            nb = idx + sign * directions[k]
            on = nb_active[side, k]
            neighbors[side, k, on] = index[tuple(nb[on].T)]
            off = np.flatnonzero(~on)
            if off.size:
                bpts = pts[off] + (theta[side, k, off] * dx)[:, None] * (sign * directions[k])
                boundary_points.append(bpts)
                bnd[side, k, off] = count + np.arange(off.size)
                count += off.size

    node_class = np.full(shape, EXTERIOR, dtype=np.int8)
    node_class[demoted] = DEMOTED
    full = np.all(nb_active, axis=(0, 1))
    node_class[tuple(idx[full].T)] = INTERIOR
    node_class[tuple(idx[~full].T)] = BOUNDARY_ADJACENT

    grid = Grid(
        domain=domain,
        N=N,
        min_offset=float(min_offset),
        dx=dx,
        lo=lo,
        shape=shape,
        node_class=node_class,
        index=index,
        multi_index=idx,
        points=pts,
        directions=directions,
        neighbor_plus=neighbors[0],
        neighbor_minus=neighbors[1],
        theta_plus=theta[0],
        theta_minus=theta[1],
        boundary_plus=bnd[0],
        boundary_minus=bnd[1],
        boundary_points=np.vstack(boundary_points) if boundary_points else np.zeros((0, dim)),
    )
    logger.debug(f"Built grid on {domain.kind}: N={N}, dx={dx:.3e}, nodes={M}")
    return grid
