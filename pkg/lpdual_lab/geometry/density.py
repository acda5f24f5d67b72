"""
Density catalog: the spherical datum f and its Euclidean pull-back g.

Spherical densities are evaluated at unit vectors of R^n, Euclidean ones at
chart points of R^{n-1}. The two sides are related by
g(x) = f(pi(x)) (1 + |x|^2)^(-(n + p) / 2).
"""
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from ..core.error import ConfigError
from .chart import ChartMap

if TYPE_CHECKING:
    from ..models.params import DensityConfig, ProblemParams

SIDES = ("euclidean", "spherical")


class Density(ABC):
    """Strictly positive density on one side of the chart."""

    side: str = "euclidean"
    family: str = "constant"

    @abstractmethod
    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Values at unit vectors (spherical side) or chart points (euclidean side)."""
        pass

    @abstractmethod
    def lower_bound(self) -> float:
        """A positive lower bound, used for precondition checks."""
        pass

    @abstractmethod
    def upper_bound(self) -> float:
        pass


class ConstantDensity(Density):
    family = "constant"

    def __init__(self, c: float, side: str = "euclidean"):
        if c <= 0:
            raise ConfigError(f"density must be strictly positive, got constant {c}")
        if side not in SIDES:
            raise ConfigError(f"unknown density side '{side}'")
        self.c = float(c)
        self.side = side

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.full(pts.shape[0], self.c)

    def lower_bound(self) -> float:
        return self.c

    def upper_bound(self) -> float:
        return self.c

    def __repr__(self) -> str:
        return f"ConstantDensity(c={self.c}, side={self.side})"


class BumpDensity(Density):
    """floor + amplitude * exp(-|y - center|^2 / (2 width^2))."""

    family = "bump"

    def __init__(
        self,
        center: Sequence[float],
        width: float,
        amplitude: float,
        floor: float,
        side: str = "euclidean",
    ):
        if floor <= 0 or amplitude < 0 or width <= 0:
            raise ConfigError("bump density needs floor > 0, amplitude >= 0 and width > 0")
        if side not in SIDES:
            raise ConfigError(f"unknown density side '{side}'")
        self.center = np.asarray(center, dtype=float)
        if side == "spherical":
            self.center = self.center / np.linalg.norm(self.center)
        self.width = float(width)
        self.amplitude = float(amplitude)
        self.floor = float(floor)
        self.side = side

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.center.size:
            raise ConfigError(
                f"bump center has dimension {self.center.size}, points have {pts.shape[1]}"
            )
        r2 = np.sum((pts - self.center) ** 2, axis=1)
        return self.floor + self.amplitude * np.exp(-r2 / (2.0 * self.width**2))

    def lower_bound(self) -> float:
        return self.floor

    def upper_bound(self) -> float:
        return self.floor + self.amplitude

    def __repr__(self) -> str:
        return (f"BumpDensity(center={self.center.tolist()}, width={self.width}, "
                f"amplitude={self.amplitude}, floor={self.floor}, side={self.side})")


class PulledBackDensity(Density):
    """Euclidean density g(x) = f(pi(x)) (1 + |x|^2)^(-(n + p)/2)."""

    side = "euclidean"

    def __init__(self, f: Density, n: int, p: float, chart: Optional[ChartMap] = None):
        self.f = f
        self.n = n
        self.p = float(p)
        self.chart = chart or ChartMap(n=n)
        self.family = f"pulled-back-{f.family}"

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        weight = (1.0 + np.sum(pts**2, axis=1)) ** (-(self.n + self.p) / 2.0)
        return self.f(self.chart.chart_point(pts)) * weight

    def lower_bound(self) -> float:
        # positivity only; the chart weight decays, domain bounds come from node values
        return self.f.lower_bound()

    def upper_bound(self) -> float:
        return self.f.upper_bound()

    def __repr__(self) -> str:
        return f"PulledBackDensity({self.f!r}, n={self.n}, p={self.p})"


class PushedForwardDensity(Density):
    """Spherical density f(y) = g(x) (1 + |x|^2)^((n + p)/2), x = chart coordinates of y."""

    side = "spherical"

    def __init__(self, g: Density, n: int, p: float, chart: Optional[ChartMap] = None):
        self.g = g
        self.n = n
        self.p = float(p)
        self.chart = chart or ChartMap(n=n)
        self.family = f"pushed-forward-{g.family}"

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = self.chart.chart_inverse(np.atleast_2d(np.asarray(points, dtype=float)))
        weight = (1.0 + np.sum(x**2, axis=1)) ** ((self.n + self.p) / 2.0)
        return self.g(x) * weight

    def lower_bound(self) -> float:
        return self.g.lower_bound()

    def upper_bound(self) -> float:
        return np.inf


def pull_back_density(
    f: Density, params: "ProblemParams", chart: Optional[ChartMap] = None
) -> Density:
    """
    Euclidean density of a spherical one.

    Args:
        f: spherical-side density
        params: problem whose exponents ``n`` and ``p`` enter the chart weight
        chart: chart map (default pole: last axis)

    Raises:
        ConfigError: f is not a spherical density or is not strictly positive
    """
    if f.side != "spherical":
        raise ConfigError(f"pull_back_density expects a spherical density, got side '{f.side}'")
    if not f.lower_bound() > 0:
        raise ConfigError("pull_back_density rejects non-positive densities")
    return PulledBackDensity(f, params.n, params.p, chart)


def push_forward_density(
    g: Density, params: "ProblemParams", chart: Optional[ChartMap] = None
) -> Density:
    """Inverse of pull_back_density."""
    if g.side != "euclidean":
        raise ConfigError(f"push_forward_density expects a euclidean density, got side '{g.side}'")
    if isinstance(g, PulledBackDensity):
        return g.f
    return PushedForwardDensity(g, params.n, params.p, chart)


def make_density(config: "DensityConfig", params: "ProblemParams") -> Density:
    """
    Euclidean-side density from a DensityConfig entry of params.

    Spherical entries are pulled back through the chart at ``config.pole``.
    """
    n = params.n
    chart = ChartMap(n=n, pole=config.pole)
    if config.family == "pulled-back-constant":
        return pull_back_density(ConstantDensity(config.c, "spherical"), params, chart)
    if config.family == "constant":
        base: Density = ConstantDensity(config.c, config.side)
    elif config.family == "bump":
        center = tuple(config.center)
        want = n if config.side == "spherical" else n - 1
        if config.side == "spherical" and len(center) == n - 1:
            center = tuple(chart.chart_point(np.asarray(center, dtype=float)))
        center = (center + (0.0,) * want)[:want]
        base = BumpDensity(center, config.width, config.amplitude, config.floor, config.side)
    else:
        raise ConfigError(f"unknown density family '{config.family}'")
    if base.side == "spherical":
        return pull_back_density(base, params, chart)
    return base
