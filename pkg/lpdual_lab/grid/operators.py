"""
Finite-difference operators on a Grid.

Every directional operator is a pair (A, B) of sparse matrices with
D u = A u + B g, where u holds interior values and g the boundary values at
grid.boundary_points. Non-uniform three-point formulas are used wherever an
offset is below one; at regular nodes they reduce to the centred ones.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Callable, List, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from ..core.config import EIGEN_CLAMP

if TYPE_CHECKING:
    from .field import ScalarField
    from .lattice import Grid

Operator = Tuple[sparse.csr_matrix, sparse.csr_matrix]


@dataclass(frozen=True, eq=False)
class Stencils:
    """First and second directional differences along grid.directions (unit-speed)."""
    first: List[Operator]
    second: List[Operator]

    def gradient(self, a: int) -> Operator:
        return self.first[a]

    def hessian(self, i: int, j: int) -> Operator:
        """(A, B) for the second derivative d_i d_j; mixed terms from the diagonals."""
        if i == j:
            return self.second[i]
        (Ae, Be), (Af, Bf) = self.second[2], self.second[3]
        return 0.5 * (Ae - Af), 0.5 * (Be - Bf)


def _assemble(
    grid: "Grid",
    k: int,
    diag: np.ndarray,
    plus: np.ndarray,
    minus: np.ndarray,
) -> Operator:
    M = grid.size
    B = grid.boundary_points.shape[0]
    rows_a, cols_a, vals_a = [np.arange(M)], [np.arange(M)], [diag]
    rows_b, cols_b, vals_b = [], [], []
    for nb, bd, coef in ((grid.neighbor_plus[k], grid.boundary_plus[k], plus),
                         (grid.neighbor_minus[k], grid.boundary_minus[k], minus)):
        on = nb >= 0
        rows_a.append(np.flatnonzero(on))
        cols_a.append(nb[on])
        vals_a.append(coef[on])
        rows_b.append(np.flatnonzero(~on))
        cols_b.append(bd[~on])
        vals_b.append(coef[~on])
    A = sparse.coo_matrix(
        (np.concatenate(vals_a), (np.concatenate(rows_a), np.concatenate(cols_a))), shape=(M, M)
    ).tocsr()
    Bm = sparse.coo_matrix(
        (np.concatenate(vals_b), (np.concatenate(rows_b), np.concatenate(cols_b))), shape=(M, B)
    ).tocsr()
    return A, Bm


def assemble_stencils(grid: "Grid") -> Stencils:
    first, second = [], []
    for k in range(grid.directions.shape[0]):
        hp, hm = grid.h_plus(k), grid.h_minus(k)
        s = hp + hm
        second.append(_assemble(grid, k, -2.0 / (hp * hm), 2.0 / (hp * s), 2.0 / (hm * s)))
        first.append(_assemble(grid, k, (hp - hm) / (hp * hm), hm / (hp * s), -hp / (hm * s)))
    return Stencils(first=first, second=second)


BoundaryData = Union[None, float, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def boundary_vector(grid: "Grid", boundary_values: BoundaryData) -> np.ndarray:
    """Boundary data at grid.boundary_points (default zero)."""
    B = grid.boundary_points.shape[0]
    if boundary_values is None:
        return np.zeros(B)
    if callable(boundary_values):
        return np.asarray(boundary_values(grid.boundary_points), dtype=float)
    return np.broadcast_to(np.asarray(boundary_values, dtype=float), (B,)).copy()


@dataclass(frozen=True, eq=False)
class DerivedQuantities:
    """Per-node derivatives of a field and the quantities built from them."""
    points: np.ndarray
    values: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    u_star: np.ndarray = field(init=False)
    rho2: np.ndarray = field(init=False)
    det: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        u_star = np.einsum("ij,ij->i", self.points, self.grad) - self.values
        object.__setattr__(self, "u_star", u_star)
        object.__setattr__(self, "rho2", np.sum(self.grad**2, axis=1) + u_star**2)
        if self.hess.shape[1] == 1:
            det = self.hess[:, 0, 0].copy()
        else:
            det = self.hess[:, 0, 0] * self.hess[:, 1, 1] - self.hess[:, 0, 1] ** 2
        object.__setattr__(self, "det", det)

    @cached_property
    def eigh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Ascending Hessian eigenvalues (M, d) and eigenvectors (M, d, d)."""
        return np.linalg.eigh(self.hess)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigh[0]

    @property
    def min_eig(self) -> np.ndarray:
        return self.eigh[0][:, 0]

    def convexity_violations(self, tol: float) -> int:
        return int(np.sum(self.min_eig < -tol))

    def clamped_eigenvalues(self, clamp: float = EIGEN_CLAMP) -> np.ndarray:
        return np.maximum(self.eigh[0], clamp)

    def log_det_clamped(self, clamp: float = EIGEN_CLAMP) -> np.ndarray:
        return np.sum(np.log(self.clamped_eigenvalues(clamp)), axis=1)

    def inverse_hessian_clamped(self, clamp: float = EIGEN_CLAMP) -> np.ndarray:
        """V diag(1 / max(lambda, clamp)) V^T per node."""
        lam, vec = self.eigh
        inv = 1.0 / np.maximum(lam, clamp)
        return np.einsum("mik,mk,mjk->mij", vec, inv, vec)

    @property
    def sup_grad(self) -> float:
        return float(np.sqrt(np.max(np.sum(self.grad**2, axis=1))))


def apply(op: Operator, u: np.ndarray, g: np.ndarray) -> np.ndarray:
    A, B = op
    out = A @ u
    if B.shape[1]:
        out = out + B @ g
    return out


def differentiate(u: "ScalarField", boundary_values: BoundaryData = None) -> DerivedQuantities:
    """
    Gradient, Hessian and derived quantities of a field.

    Args:
        u: field on its grid
        boundary_values: boundary data (default: the implicit zero trace)
    """
    grid = u.grid
    st = grid.stencils
    g = boundary_vector(grid, boundary_values)
    d = grid.dim
    grad = np.stack([apply(st.gradient(a), u.values, g) for a in range(d)], axis=1)
    hess = np.empty((grid.size, d, d))
    for i in range(d):
        for j in range(i, d):
            hess[:, i, j] = apply(st.hessian(i, j), u.values, g)
            hess[:, j, i] = hess[:, i, j]
    return DerivedQuantities(points=grid.points, values=u.values, grad=grad, hess=hess)


def derived_from_values(
    grid: "Grid", values: np.ndarray, boundary_values: Optional[BoundaryData] = None
) -> DerivedQuantities:
    from .field import ScalarField

    return differentiate(ScalarField(grid, values), boundary_values)
