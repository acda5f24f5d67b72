"""
q-volume, its first variation and the invariant integral in chart coordinates.

With u(x) = sqrt(1 + |x|^2) h(pi(x)) all conformal factors cancel and
V_q(u) = (1/q) int_U rho^(q-n) (-u) det D^2 u dx.
"""
from typing import Optional, Union

import numpy as np

from ..core.error import DomainError
from ..geometry.chart import ChartMap, support_values
from ..grid.field import ScalarField
from ..grid.operators import DerivedQuantities, differentiate
from ..grid.quadrature import integrate


def _rho_power(dq: DerivedQuantities, exponent: float) -> np.ndarray:
    """(rho^2)^(exponent/2) with a domain check for negative exponents."""
    if exponent == 0:
        return np.ones_like(dq.rho2)
    if exponent < 0 and np.any(dq.rho2 <= 0):
        raise DomainError("rho vanishes at some node; negative powers are undefined")
    return dq.rho2 ** (0.5 * exponent)


def _check_admissible(u: ScalarField) -> None:
    if np.any(u.values > 0):
        raise DomainError(
            f"functional needs u <= 0 at interior nodes, max value {float(u.values.max()):.3e}"
        )


def eval_Vq(u: ScalarField, q: float, n: int, dq: Optional[DerivedQuantities] = None) -> float:
    """
    Chart q-volume (1/q) int rho^(q-n) (-u) det D^2 u dx.

    Raises:
        DomainError: q = 0 or u has positive interior values
    """
    if q == 0:
        raise DomainError("V_q is undefined for q = 0")
    _check_admissible(u)
    dq = dq if dq is not None else differentiate(u)
    integrand = _rho_power(dq, q - n) * (-u.values) * dq.det
    return integrate(u.grid, integrand) / q


def first_variation_Vq(
    u: ScalarField,
    psi: Union[ScalarField, np.ndarray],
    q: float,
    n: int,
    dq: Optional[DerivedQuantities] = None,
) -> float:
    """delta V_q(u)[psi] = -int rho^(q-n) psi det D^2 u dx, psi vanishing on the boundary."""
    dq = dq if dq is not None else differentiate(u)
    psi_values = psi.values if isinstance(psi, ScalarField) else np.asarray(psi, dtype=float)
    return -integrate(u.grid, _rho_power(dq, q - n) * psi_values * dq.det)


def eval_invariant_I0(u: ScalarField, n: int, dq: Optional[DerivedQuantities] = None) -> float:
    """int (-u) det D^2 u rho^(-n) dx; depends on the domain only."""
    _check_admissible(u)
    dq = dq if dq is not None else differentiate(u)
    return integrate(u.grid, (-u.values) * dq.det * _rho_power(dq, -n))


def spherical_Vq(u: ScalarField, q: float, n: int, pole=None) -> float:
    """
    V_q assembled from the spherical quantities at the chart images of the nodes.

    Uses h = u / sqrt(1 + |x|^2), det(hess h + h I) = (1 + |x|^2)^((n+1)/2) det D^2 u,
    sqrt(|grad h|^2 + h^2) = rho and the area element (1 + |x|^2)^(-n/2).
    """
    if q == 0:
        raise DomainError("V_q is undefined for q = 0")
    _check_admissible(u)
    chart = ChartMap(n=n, pole=pole)
    x = u.grid.points
    dq = differentiate(u)
    h = support_values(x, u.values)
    weight = 1.0 + np.sum(x**2, axis=1)
    det_sphere = weight ** ((n + 1) / 2.0) * dq.det
    area = chart.volume_element(x)
    integrand = _rho_power(dq, q - n) * (-h) * det_sphere * area
    return integrate(u.grid, integrand) / q
