"""
Bounded convex domains of the chart hyperplane.

Every domain answers membership exactly (strict inequalities on closed-form
descriptions); boundary distance, diameter and measure are total functions.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Protocol, Tuple

import numpy as np
from scipy import integrate, special
from scipy.spatial.distance import pdist

from ..core.error import ConfigError
from ..core.logger import get_logger

logger = get_logger(__name__)

BISECTION_ITERS = 60
POLYLINE_SAMPLES = 4096


class ConvexDomain(Protocol):
    """
    Protocol defining the interface of chart domains.
    """
    kind: str
    dim: int

    def contains(self, points: np.ndarray) -> np.ndarray:
        ...

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        ...

    @property
    def diameter(self) -> float:
        ...

    @property
    def measure(self) -> float:
        ...

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        ...


def as_points(points: Any, dim: int) -> np.ndarray:
    """Coerce a point or a list of points to a float array of shape (M, dim)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, dim) if arr.size != dim else arr.reshape(1, dim)
    if arr.shape[-1] != dim:
        raise ConfigError(f"expected points of dimension {dim}, got shape {arr.shape}")
    return arr


def _segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to each segment [a_k, b_k]; returns the minimum over segments."""
    best = np.full(points.shape[0], np.inf)
    ab = b - a
    ab2 = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    # chunk over points to bound memory
    for start in range(0, points.shape[0], 256):
        chunk = points[start:start + 256]
        ap = chunk[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("mkj,kj->mk", ap, ab) / ab2[None, :], 0.0, 1.0)
        proj = a[None, :, :] + t[..., None] * ab[None, :, :]
        dist = np.linalg.norm(chunk[:, None, :] - proj, axis=-1)
        best[start:start + 256] = dist.min(axis=1)
    return best


@dataclass(frozen=True)
class BaseDomain:
    """
    Base class with the queries every domain derives from membership.
    """
    kind: str = field(init=False, default="base")
    dim: int = field(init=False, default=2)

    def contains(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def boundary_polyline(self, k: int = POLYLINE_SAMPLES) -> np.ndarray:
        """Closed boundary polyline (first vertex repeated at the end)."""
        directions = np.stack(
            [np.cos(np.linspace(0, 2 * np.pi, k + 1)), np.sin(np.linspace(0, 2 * np.pi, k + 1))],
            axis=1,
        )
        pts = self.boundary_point(directions)
        pts[-1] = pts[0]
        return pts

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, self.dim)
        poly = self._polyline
        return _segment_distance(pts, poly[:-1], poly[1:])

    @cached_property
    def _polyline(self) -> np.ndarray:
        return self.boundary_polyline()

    @cached_property
    def diameter(self) -> float:
        poly = self.boundary_polyline(1024)[:-1]
        return float(pdist(poly).max())

    @property
    def measure(self) -> float:
        raise NotImplementedError

    @property
    def interior_point(self) -> np.ndarray:
        lo, hi = self.bounding_box
        return 0.5 * (lo + hi)

    def boundary_point(
        self, directions: np.ndarray, origin: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """
        Intersection of rays origin + t*direction (t > 0) with the boundary, by bisection.

        Args:
            directions: (K, dim) ray directions (need not be normalized)
            origin: interior point; defaults to ``interior_point``

        Returns:
            (K, dim) boundary points
        """
        dirs = as_points(directions, self.dim)
        dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
        x0 = self.interior_point if origin is None else np.asarray(origin, dtype=float)
        lo_box, hi_box = self.bounding_box
        reach = 2.0 * float(np.linalg.norm(hi_box - lo_box)) + 1.0
        lo = np.zeros(dirs.shape[0])
        hi = np.full(dirs.shape[0], reach)
        for _ in range(BISECTION_ITERS + 20):
            mid = 0.5 * (lo + hi)
            inside = self.contains(x0[None, :] + mid[:, None] * dirs)
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return x0[None, :] + (0.5 * (lo + hi))[:, None] * dirs

    def sample_boundary(self, k: int) -> np.ndarray:
        """k boundary points at equally spaced angles seen from the interior point."""
        angles = 2 * np.pi * np.arange(k) / k
        return self.boundary_point(np.stack([np.cos(angles), np.sin(angles)], axis=1))

    def inward_normal(self, z0: np.ndarray, delta: float = 1e-5) -> np.ndarray:
        """Inward unit normal at a smooth boundary point, from two neighbouring boundary points."""
        z0 = np.asarray(z0, dtype=float)
        x0 = self.interior_point
        v = z0 - x0
        angle = math.atan2(v[1], v[0])
        pts = self.boundary_point(
            np.array([[math.cos(angle - delta), math.sin(angle - delta)],
                      [math.cos(angle + delta), math.sin(angle + delta)]])
        )
        tangent = pts[1] - pts[0]
        normal = np.array([-tangent[1], tangent[0]])
        normal /= np.linalg.norm(normal)
        if np.dot(normal, x0 - z0) < 0:
            normal = -normal
        return normal

    def gauge(self, points: np.ndarray) -> np.ndarray:
        """
        Minkowski gauge about the interior point: 0 there, 1 on the boundary.

        Convex and positively homogeneous along rays from ``interior_point``.
        """
        pts = as_points(points, self.dim)
        x0 = self.interior_point
        rel = pts - x0
        r = np.linalg.norm(rel, axis=1)
        out = np.zeros(pts.shape[0])
        moving = r > 0
        if np.any(moving):
            z = self.boundary_point(rel[moving], origin=x0)
            out[moving] = r[moving] / np.linalg.norm(z - x0, axis=1)
        return out

    def defining_quadratic(self, points: np.ndarray) -> np.ndarray:
        """
        Quadratic gauge gauge(x)^2 - 1: convex, negative on the domain, zero on its boundary.

        For disks and ellipses this is the usual defining quadratic; used for initial guesses.
        """
        return self.gauge(points) ** 2 - 1.0

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "dim": self.dim}


@dataclass(frozen=True)
class Disk(BaseDomain):
    """Disk of radius R; for dim = 1 the interval (c - R, c + R)."""
    radius: float = 1.0
    center: Tuple[float, ...] = (0.0, 0.0)
    ndim: int = 2

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ConfigError(f"disk radius must be positive, got {self.radius}")
        if self.ndim not in (1, 2):
            raise ConfigError(f"chart dimension must be 1 or 2, got {self.ndim}")
        center = tuple(float(c) for c in self.center)[: self.ndim]
        if len(center) < self.ndim:
            center = center + (0.0,) * (self.ndim - len(center))
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "kind", "disk")
        object.__setattr__(self, "dim", self.ndim)

    @property
    def _c(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, self.dim)
        return np.sum((pts - self._c) ** 2, axis=1) < self.radius**2

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, self.dim)
        return np.abs(self.radius - np.linalg.norm(pts - self._c, axis=1))

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def measure(self) -> float:
        return 2.0 * self.radius if self.dim == 1 else math.pi * self.radius**2

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._c - self.radius, self._c + self.radius

    @property
    def interior_point(self) -> np.ndarray:
        return self._c.copy()

    def inward_normal(self, z0: np.ndarray, delta: float = 1e-5) -> np.ndarray:
        v = self._c - np.asarray(z0, dtype=float)
        return v / np.linalg.norm(v)

    def sample_boundary(self, k: int) -> np.ndarray:
        if self.dim == 1:
            return np.array([[self._c[0] - self.radius], [self._c[0] + self.radius]])
        angles = 2 * np.pi * np.arange(k) / k
        return self._c + self.radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)

    def gauge(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, self.dim)
        return np.linalg.norm(pts - self._c, axis=1) / self.radius

    def defining_quadratic(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, self.dim)
        return np.sum((pts - self._c) ** 2, axis=1) / self.radius**2 - 1.0

    def describe(self) -> Dict[str, Any]:
        return {"kind": "disk", "dim": self.dim, "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class Polygon(BaseDomain):
    """Convex polygon, vertices in counterclockwise order."""
    vertices: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
            raise ConfigError("polygon needs at least 3 planar vertices")
        edges = np.roll(verts, -1, axis=0) - verts
        nxt = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        if np.any(cross < 0) or not np.any(cross > 0):
            raise ConfigError(
                "polygon vertices must be counterclockwise with non-negative turning",
                details={"cross_products": cross.tolist()},
            )
        object.__setattr__(self, "vertices", tuple(tuple(map(float, v)) for v in verts))
        object.__setattr__(self, "kind", "polygon")
        object.__setattr__(self, "dim", 2)

    @property
    def _verts(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, 2)
        verts = self._verts
        edges = np.roll(verts, -1, axis=0) - verts
        rel = pts[:, None, :] - verts[None, :, :]
        cross = edges[None, :, 0] * rel[..., 1] - edges[None, :, 1] * rel[..., 0]
        nondegenerate = np.linalg.norm(edges, axis=1) > 0
        return np.all(cross[:, nondegenerate] > 0, axis=1)

    def boundary_polyline(self, k: int = POLYLINE_SAMPLES) -> np.ndarray:
        verts = self._verts
        return np.vstack([verts, verts[:1]])

    @property
    def diameter(self) -> float:
        return float(pdist(self._verts).max())

    @property
    def measure(self) -> float:
        x, y = self._verts.T
        return float(0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._verts.min(axis=0), self._verts.max(axis=0)

    @property
    def interior_point(self) -> np.ndarray:
        return self._verts.mean(axis=0)

    def gauge(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, 2)
        verts = self._verts
        x0 = self.interior_point
        edges = np.roll(verts, -1, axis=0) - verts
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        support = np.einsum("kj,kj->k", normals, verts - x0)
        keep = support > 0
        ratios = ((pts - x0) @ normals[keep].T) / support[keep]
        return np.clip(ratios.max(axis=1), 0.0, None)

    def corners(self) -> np.ndarray:
        return self._verts.copy()

    def describe(self) -> Dict[str, Any]:
        return {"kind": "polygon", "dim": 2, "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class Superellipse(BaseDomain):
    """|x/a1|^m + |y/a2|^m < 1 around a center; convex for m >= 1."""
    a1: float = 1.0
    a2: float = 1.0
    m: float = 4.0
    center: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.a1 <= 0 or self.a2 <= 0:
            raise ConfigError("superellipse semi-axes must be positive")
        if self.m < 1:
            raise ConfigError(f"superellipse exponent m must be >= 1 for convexity, got {self.m}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center)[:2])
        object.__setattr__(self, "kind", "superellipse")
        object.__setattr__(self, "dim", 2)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, 2) - np.asarray(self.center)
        return np.abs(pts[:, 0] / self.a1) ** self.m + np.abs(pts[:, 1] / self.a2) ** self.m < 1.0

    def boundary_polyline(self, k: int = POLYLINE_SAMPLES) -> np.ndarray:
        t = np.linspace(0, 2 * np.pi, k + 1)
        c, s = np.cos(t), np.sin(t)
        x = self.a1 * np.sign(c) * np.abs(c) ** (2.0 / self.m)
        y = self.a2 * np.sign(s) * np.abs(s) ** (2.0 / self.m)
        pts = np.stack([x, y], axis=1) + np.asarray(self.center)
        pts[-1] = pts[0]
        return pts

    @cached_property
    def diameter(self) -> float:
        # centrally symmetric: diameter is twice the largest radius
        poly = self.boundary_polyline(20000) - np.asarray(self.center)
        return float(2.0 * np.linalg.norm(poly, axis=1).max())

    @property
    def measure(self) -> float:
        m, gamma = self.m, special.gamma
        return float(4 * self.a1 * self.a2 * gamma(1 + 1 / m) ** 2 / gamma(1 + 2 / m))

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        half = np.array([self.a1, self.a2])
        return c - half, c + half

    def describe(self) -> Dict[str, Any]:
        return {"kind": "superellipse", "dim": 2, "a1": self.a1, "a2": self.a2, "m": self.m,
                "center": list(self.center)}


@dataclass(frozen=True)
class Cusp(BaseDomain):
    """
    Flat-faced barrier domain built from exponents (a, b), s = b / (1 - a).

    The literal region {|x1| < 1, 0 < x2 < (1 - x1^2)^s} is convex only for
    s <= 1, so the domain is its convex hull: the cap profile (1 - x1^2)^s for
    |x1| <= t0 = 1/(2s - 1), continued by the tangent segments through (+-1, 0).
    The hull shares the flat face x2 = 0 and the central cap arc with the
    literal region and contains it.
    """
    a: float = 0.8
    b: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if not 0 < self.a < 1:
            raise ConfigError(f"cusp exponent a must lie in (0, 1), got {self.a}")
        if self.b <= 0:
            raise ConfigError(f"cusp exponent b must be positive, got {self.b}")
        if self.s < 1:
            raise ConfigError(f"cusp profile exponent s = b/(1-a) must be >= 1, got {self.s}")
        object.__setattr__(self, "kind", "cusp")
        object.__setattr__(self, "dim", 2)

    @property
    def s(self) -> float:
        return self.b / (1.0 - self.a)

    @property
    def tangent_abscissa(self) -> float:
        return 1.0 / (2.0 * self.s - 1.0)

    def literal_profile(self, x1: np.ndarray) -> np.ndarray:
        x1 = np.asarray(x1, dtype=float)
        base = np.clip(1.0 - x1**2, 0.0, None)
        return base**self.s

    def hull_profile(self, x1: np.ndarray) -> np.ndarray:
        x1 = np.abs(np.asarray(x1, dtype=float))
        t0 = self.tangent_abscissa
        cap = np.clip(1.0 - x1**2, 0.0, None) ** self.s
        if t0 >= 1.0:
            return cap
        f0 = (1.0 - t0**2) ** self.s
        line = f0 * np.clip(1.0 - x1, 0.0, None) / (1.0 - t0)
        return np.where(x1 <= t0, cap, line)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, 2)
        x1, x2 = pts[:, 0], pts[:, 1]
        return (np.abs(x1) < 1.0) & (x2 > 0.0) & (x2 < self.hull_profile(x1))

    def in_literal_region(self, points: np.ndarray) -> np.ndarray:
        pts = as_points(points, 2)
        x1, x2 = pts[:, 0], pts[:, 1]
        return (np.abs(x1) < 1.0) & (x2 > 0.0) & (x2 < self.literal_profile(x1))

    def literal_boundary_samples(self, k: int) -> np.ndarray:
        """k points on each boundary piece of the literal region (flat face and cap)."""
        x1 = np.linspace(-1.0, 1.0, k + 2)[1:-1]
        face = np.stack([x1, np.zeros_like(x1)], axis=1)
        cap = np.stack([x1, self.literal_profile(x1)], axis=1)
        return np.vstack([face, cap])

    def boundary_polyline(self, k: int = POLYLINE_SAMPLES) -> np.ndarray:
        x1 = np.linspace(1.0, -1.0, k + 1)
        top = np.stack([x1, self.hull_profile(x1)], axis=1)
        return np.vstack([top, top[:1]])

    @property
    def diameter(self) -> float:
        return 2.0

    @cached_property
    def measure(self) -> float:
        t0 = min(self.tangent_abscissa, 1.0)
        cap, _err = integrate.quad(lambda t: (1.0 - t * t) ** self.s, 0.0, t0, epsabs=1e-14)
        tail = 0.0
        if t0 < 1.0:
            tail = 0.5 * (1.0 - t0**2) ** self.s * (1.0 - t0)
        return 2.0 * (cap + tail)

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array([-1.0, 0.0]), np.array([1.0, 1.0])

    @property
    def interior_point(self) -> np.ndarray:
        return np.array([0.0, 0.5])

    def describe(self) -> Dict[str, Any]:
        return {"kind": "cusp", "dim": 2, "a": self.a, "b": self.b, "s": self.s}


def make_domain(config: Any, dim: int = 2) -> BaseDomain:
    """
    Build a domain from a DomainConfig (or any object with the same attributes).

    Raises:
        ConfigError: unknown kind, dimension mismatch or invalid parameters
    """
    kind = config.kind
    if kind != "disk" and dim != 2:
        raise ConfigError(f"domain kind '{kind}' requires chart dimension 2, got {dim}")
    if kind == "disk":
        return Disk(radius=config.radius, center=tuple(config.center), ndim=dim)
    if kind == "polygon":
        return Polygon(vertices=tuple(tuple(v) for v in config.vertices))
    if kind == "superellipse":
        return Superellipse(a1=config.a1, a2=config.a2, m=config.m, center=tuple(config.center))
    if kind == "cusp":
        if config.b is None:
            raise ConfigError("cusp domain needs b (normally b = (q-1)/(q-p))")
        return Cusp(a=config.a, b=config.b)
    raise ConfigError(f"unknown domain kind '{kind}'")


def polar_cap_measure(domain: BaseDomain, n: int) -> float:
    """
    Solid angle of the cone over a centered chart disk, seen from the polar side.

    This is the value of the invariant integral of (-u) det D^2 u / rho^n for any
    admissible convex u on the disk: |S^{n-2}| * int_0^alpha sin^{n-2} dt with
    alpha = pi/2 - arctan R.

    Raises:
        ConfigError: domain is not a disk centered at the origin
    """
    if not isinstance(domain, Disk) or np.any(np.abs(domain._c) > 0):
        raise ConfigError("closed-form polar cap measure needs a disk centered at the origin")
    alpha = 0.5 * math.pi - math.atan(domain.radius)
    d = n - 1
    # |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    sphere = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    angular, _err = integrate.quad(lambda t: math.sin(t) ** (n - 2), 0.0, alpha, epsabs=1e-14)
    return float(sphere * angular)
