"""
Central projection between the chart hyperplane and the unit sphere.

A point x of the hyperplane tangent at the pole e maps to
pi(x) = (x + e) / sqrt(1 + |x|^2); support functions h on the sphere and chart
fields u correspond through u(x) = sqrt(1 + |x|^2) h(pi(x)).
"""
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from ..core.error import ConfigError, DomainError

if TYPE_CHECKING:
    from ..grid.field import ScalarField
    from ..grid.lattice import Grid


def _default_pole(n: int) -> np.ndarray:
    e = np.zeros(n)
    e[-1] = 1.0
    return e


@dataclass(frozen=True, eq=False)
class ChartMap:
    """
    Chart at a unit pole e of R^n with an orthonormal basis of the tangent hyperplane.

    The default pole is the last coordinate axis, and then the basis is the
    first n - 1 coordinate axes, so chart coordinates are ambient coordinates.
    """
    n: int = 3
    pole: Optional[Sequence[float]] = None
    e: np.ndarray = field(init=False, repr=False)
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ConfigError(f"ambient dimension must be >= 2, got {self.n}")
        if self.pole is None:
            e = _default_pole(self.n)
            basis = np.eye(self.n)[:, : self.n - 1]
        else:
            e = np.asarray(self.pole, dtype=float)
            if e.shape != (self.n,) or np.linalg.norm(e) == 0:
                raise ConfigError(f"pole must be a non-zero vector of length {self.n}")
            e = e / np.linalg.norm(e)
            if np.allclose(e, _default_pole(self.n)):
                basis = np.eye(self.n)[:, : self.n - 1]
            else:
                basis = null_space(e[None, :])
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "basis", basis)

    @property
    def d(self) -> int:
        return self.n - 1

    def chart_point(self, x: np.ndarray) -> np.ndarray:
        """pi(x) for one chart point (shape (d,)) or many (shape (M, d))."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = x.reshape(1, -1) if single else x
        if pts.shape[1] != self.d:
            raise ConfigError(f"chart points must have dimension {self.d}, got {pts.shape[1]}")
        y = pts @ self.basis.T + self.e[None, :]
        y /= np.sqrt(1.0 + np.sum(pts**2, axis=1))[:, None]
        return y[0] if single else y

    def chart_inverse(self, y: np.ndarray) -> np.ndarray:
        """Chart coordinates of sphere points in the open hemisphere y . e > 0."""
        y = np.asarray(y, dtype=float)
        single = y.ndim == 1
        pts = y.reshape(1, -1) if single else y
        height = pts @ self.e
        if np.any(height <= 0):
            raise DomainError("chart_inverse needs points with y . e > 0")
        x = (pts @ self.basis) / height[:, None]
        return x[0] if single else x

    def conformal_factor(self, x: np.ndarray) -> np.ndarray:
        """sqrt(1 + |x|^2) per chart point."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        return np.sqrt(1.0 + np.sum(pts**2, axis=1))

    def volume_element(self, x: np.ndarray) -> np.ndarray:
        """Spherical area element in chart coordinates, (1 + |x|^2)^(-n/2)."""
        return self.conformal_factor(x) ** (-float(self.n))


def chart_point(x: np.ndarray, e: Optional[Sequence[float]] = None) -> np.ndarray:
    """pi(x) with pole e (default: last axis of R^{d+1})."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] + 1
    return ChartMap(n=n, pole=e).chart_point(x)


def support_values(points: np.ndarray, u_values: np.ndarray) -> np.ndarray:
    """h(pi(x)) = u(x) / sqrt(1 + |x|^2)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.asarray(u_values, dtype=float) / np.sqrt(1.0 + np.sum(pts**2, axis=1))


def field_values(points: np.ndarray, h_values: np.ndarray) -> np.ndarray:
    """u(x) = sqrt(1 + |x|^2) h(pi(x))."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.asarray(h_values, dtype=float) * np.sqrt(1.0 + np.sum(pts**2, axis=1))


@dataclass(frozen=True, eq=False)
class SphericalField:
    """Samples of a support function h at the chart images of grid nodes."""
    chart: ChartMap
    grid: "Grid"
    sphere_points: np.ndarray
    values: np.ndarray

    @property
    def admissible(self) -> bool:
        return bool(np.all(self.values < 0))

    def boundary_values(self) -> np.ndarray:
        """h on the chart images of the boundary intersection points (identically zero)."""
        return np.zeros(self.grid.boundary_points.shape[0])


def field_to_support(u: "ScalarField", e: Optional[Sequence[float]] = None) -> SphericalField:
    chart = ChartMap(n=u.grid.dim + 1, pole=e)
    points = u.grid.points
    return SphericalField(
        chart=chart,
        grid=u.grid,
        sphere_points=chart.chart_point(points),
        values=support_values(points, u.values),
    )


def support_to_field(h: SphericalField) -> "ScalarField":
    from ..grid.field import ScalarField

    return ScalarField(h.grid, field_values(h.grid.points, h.values))
