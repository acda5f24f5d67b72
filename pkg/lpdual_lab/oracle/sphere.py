"""
Closed-form spherical quantities used to validate the chart quadrature.
"""
import math
from typing import Any, Dict, List, Sequence

from scipy import integrate

from ..core.error import ConfigError
from ..functionals.volume import eval_invariant_I0
from ..geometry.chart import ChartMap
from ..geometry.domain import Disk, polar_cap_measure
from ..grid.field import ScalarField
from ..grid.lattice import build_grid
from ..grid.quadrature import integrate as grid_integrate


def unit_sphere_area(k: int) -> float:
    """|S^k| = 2 pi^((k+1)/2) / Gamma((k+1)/2)."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def spherical_cap_area(n: int, theta: float) -> float:
    """Area of the geodesic cap of half-angle theta on S^(n-1)."""
    if not 0.0 <= theta <= math.pi:
        raise ConfigError(f"cap half-angle must lie in [0, pi], got {theta}")
    if n == 3:
        return 2.0 * math.pi * (1.0 - math.cos(theta))
    angular, _err = integrate.quad(lambda t: math.sin(t) ** (n - 2), 0.0, theta, epsabs=1e-14)
    return unit_sphere_area(n - 2) * angular


def cap_area_check(n: int, theta: float, N: int) -> Dict[str, Any]:
    """
    Integrate the chart volume element over the disk of radius tan(theta), the
    chart preimage of the cap around the pole, and compare with the closed form.
    """
    if not 0.0 < theta < 0.5 * math.pi:
        raise ConfigError(f"cap half-angle must lie in (0, pi/2), got {theta}")
    disk = Disk(radius=math.tan(theta), ndim=n - 1)
    grid = build_grid(disk, N)
    chart = ChartMap(n=n)
    numeric = grid_integrate(grid, chart.volume_element)
    exact = spherical_cap_area(n, theta)
    return {
        "n": n,
        "theta": theta,
        "N": N,
        "numeric": numeric,
        "exact": exact,
        "relative_error": abs(numeric - exact) / exact,
    }


def cap_refinement(n: int, theta: float, Ns: Sequence[int]) -> List[Dict[str, Any]]:
    """cap_area_check over a grid sequence with the observed order between neighbours."""
    rows = [cap_area_check(n, theta, N) for N in Ns]
    for prev, row in zip(rows, rows[1:]):
        ratio = prev["relative_error"] / max(row["relative_error"], 1e-300)
        row["order"] = math.log(ratio) / math.log((row["N"] - 1) / (prev["N"] - 1))
    return rows


def invariant_check(u: ScalarField, n: int) -> Dict[str, Any]:
    """Relative deviation of the invariant integral of u from the polar cap measure."""
    target = polar_cap_measure(u.grid.domain, n)
    value = eval_invariant_I0(u, n)
    return {"I_0": value, "target": target, "relative_error": abs(value - target) / target}
