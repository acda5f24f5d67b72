"""
Grid functions with implicit zero boundary trace.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core.error import DomainError
from .lattice import Grid


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One value per interior node of ``grid``; the value on the boundary is 0."""
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.shape[0] != self.grid.size:
            raise DomainError(
                f"field has {values.shape[0]} values for a grid of {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "ScalarField":
        return cls(grid, fn(grid.points))

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.size))

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    @property
    def admissible(self) -> bool:
        return bool(np.all(self.values < 0))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def min_value(self) -> float:
        return float(np.min(self.values))

    def scaled(self, t: float) -> "ScalarField":
        return ScalarField(self.grid, t * self.values)

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.grid, values)

    def normalized(self) -> "ScalarField":
        """Scaled to unit sup-norm."""
        return self.scaled(1.0 / self.sup_norm)

    def distance(self, other: "ScalarField") -> float:
        """L-infinity distance to a field on the same grid."""
        if other.grid is not self.grid and other.grid.size != self.grid.size:
            raise DomainError("fields live on different grids")
        return float(np.max(np.abs(self.values - other.values)))

    def node_value(self, point: np.ndarray) -> float:
        """Value at the interior node nearest to ``point``."""
        d2 = np.sum((self.grid.points - np.asarray(point, dtype=float)) ** 2, axis=1)
        return float(self.values[int(np.argmin(d2))])
