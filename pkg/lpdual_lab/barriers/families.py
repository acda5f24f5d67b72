"""
Closed-form barrier families for the singular regime p < 1, q >= n, n = 3.

Both families are written in a boundary frame y = ((x - z0).t, (x - z0).e),
with e the inward normal at the boundary point z0 and t the tangent:

    subsolution    v = y2^a (y1^2 - C),                    a = (q-n+2)/(q-p)
    supersolution  w = C y2 - C y2^a (1 - y1^2)^b,         b = (q-1)/(q-p)

The supersolution lives in the frame z0 = 0, e = (0, 1) of the cusp domain.
Gradients and Hessians are returned in chart coordinates.
"""
from dataclasses import dataclass, replace
from typing import Literal, Optional, Tuple

import numpy as np

from ..core.error import ConfigError
from ..geometry.domain import BaseDomain, Cusp
from ..models.params import ProblemParams
from ..models.regime import Regime

Family = Literal["subsolution_v_a", "supersolution_w"]

SUB_C0 = 1.0
SUPER_C0 = 1024.0


@dataclass(frozen=True, eq=False)
class BarrierSpec:
    family: Family
    a: float
    C: float
    domain: BaseDomain
    z0: np.ndarray
    normal: np.ndarray
    b: Optional[float] = None
    n: int = 3
    p: float = 0.0
    q: float = 3.0

    @property
    def tangent(self) -> np.ndarray:
        return np.array([self.normal[1], -self.normal[0]])

    @property
    def frame(self) -> np.ndarray:
        """Rows t and e; y = frame @ (x - z0)."""
        return np.stack([self.tangent, self.normal])

    def with_C(self, C: float) -> "BarrierSpec":
        return replace(self, C=float(C))

    def local(self, points: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(points) - self.z0) @ self.frame.T

    def value(self, points: np.ndarray) -> np.ndarray:
        y = self.local(points)
        y1, y2 = y[:, 0], np.clip(y[:, 1], 0.0, None)
        if self.family == "subsolution_v_a":
            return y2**self.a * (y1**2 - self.C)
        P = np.clip(1.0 - y1**2, 0.0, None)
        return self.C * y2 - self.C * y2**self.a * P**self.b

    def local_derivatives(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Gradient (M, 2) and Hessian (M, 2, 2) in the frame coordinates."""
        y1, y2 = y[:, 0], y[:, 1]
        a, C = self.a, self.C
        grad = np.empty((y.shape[0], 2))
        hess = np.empty((y.shape[0], 2, 2))
        if self.family == "subsolution_v_a":
            grad[:, 0] = 2.0 * y1 * y2**a
            grad[:, 1] = a * y2 ** (a - 1.0) * (y1**2 - C)
            hess[:, 0, 0] = 2.0 * y2**a
            hess[:, 1, 1] = a * (a - 1.0) * y2 ** (a - 2.0) * (y1**2 - C)
            hess[:, 0, 1] = 2.0 * a * y1 * y2 ** (a - 1.0)
        else:
            b = self.b
            P = 1.0 - y1**2
            grad[:, 0] = 2.0 * C * b * y2**a * P ** (b - 1.0) * y1
            grad[:, 1] = C - C * a * y2 ** (a - 1.0) * P**b
            hess[:, 0, 0] = 2.0 * C * b * y2**a * P ** (b - 2.0) * (1.0 - (2.0 * b - 1.0) * y1**2)
            hess[:, 1, 1] = -C * a * (a - 1.0) * y2 ** (a - 2.0) * P**b
            hess[:, 0, 1] = 2.0 * C * a * b * y2 ** (a - 1.0) * P ** (b - 1.0) * y1
        hess[:, 1, 0] = hess[:, 0, 1]
        return grad, hess

    def derivatives(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Gradient and Hessian in chart coordinates."""
        Q = self.frame
        grad_y, hess_y = self.local_derivatives(self.local(points))
        grad = grad_y @ Q
        hess = np.einsum("ki,mkl,lj->mij", Q, hess_y, Q)
        return grad, hess

    def det_closed_form(self, points: np.ndarray) -> np.ndarray:
        """The factored determinant identity of each family."""
        y = self.local(points)
        y1, y2 = y[:, 0], y[:, 1]
        a, C = self.a, self.C
        if self.family == "subsolution_v_a":
            return 2.0 * y2 ** (2.0 * a - 2.0) * ((a - a * a) * C - (a + a * a) * y1**2)
        b = self.b
        P = 1.0 - y1**2
        return (
            2.0 * C**2 * a * b * y2 ** (2.0 * a - 2.0) * P ** (2.0 * b - 2.0)
            * (1.0 - a + (1.0 - 2.0 * b - a) * y1**2)
        )

    def lhs(self, points: np.ndarray, eps: float = 0.0) -> np.ndarray:
        """
        det D^2 f (eps - f)^(1-p) (|Df|^2 + (x.Df - f)^2)^((q-n)/2) at points with f < eps.

        Entries where eps - f <= 0 are NaN.
        """
        points = np.atleast_2d(points)
        f = self.value(points)
        grad, _ = self.derivatives(points)
        det = self.det_closed_form(points)
        base = eps - f
        safe = np.where(base > 0, base, 1.0)
        out = det * safe ** (1.0 - self.p)
        if self.q != self.n:
            u_star = np.einsum("ij,ij->i", points, grad) - f
            rho2 = np.sum(grad**2, axis=1) + u_star**2
            out = out * rho2 ** ((self.q - self.n) / 2.0)
        return np.where(base > 0, out, np.nan)

    def describe(self) -> dict:
        return {
            "family": self.family,
            "a": self.a,
            "b": self.b,
            "C": self.C,
            "z0": self.z0.tolist(),
            "normal": self.normal.tolist(),
            "domain": self.domain.describe(),
        }


def _check_singular(params: ProblemParams) -> None:
    if params.regime != Regime.SINGULAR:
        raise ConfigError(
            f"barriers apply to the singular regime p < 1, q >= n; got p={params.p}, q={params.q}"
        )
    if params.n != 3:
        raise ConfigError("barrier families are implemented for n = 3 (planar charts)")


def subsolution_exponent(n: int, p: float, q: float) -> float:
    return (q - n + 2.0) / (q - p)


def supersolution_exponent(p: float, q: float) -> float:
    return (q - 1.0) / (q - p)


def make_subsolution(
    params: ProblemParams,
    domain: BaseDomain,
    z0: np.ndarray,
    normal: Optional[np.ndarray] = None,
) -> BarrierSpec:
    """
    v_a at the boundary point z0, with C = C0 (1 + diam^2) before calibration.

    Raises:
        ConfigError: regime outside p < 1, q >= n, or n != 3
    """
    _check_singular(params)
    z0 = np.asarray(z0, dtype=float).reshape(2)
    e = domain.inward_normal(z0) if normal is None else np.asarray(normal, dtype=float)
    e = e / np.linalg.norm(e)
    return BarrierSpec(
        family="subsolution_v_a",
        a=subsolution_exponent(params.n, params.p, params.q),
        C=SUB_C0 * (1.0 + domain.diameter**2),
        domain=domain,
        z0=z0,
        normal=e,
        n=params.n,
        p=params.p,
        q=params.q,
    )


def make_supersolution(params: ProblemParams, a: float) -> Tuple[BarrierSpec, Cusp]:
    """
    w on the cusp domain built from (a, b).

    Raises:
        ConfigError: a outside [(q-n+2)/(q-p), 1), or a regime outside p < 1, q >= n
    """
    _check_singular(params)
    a_min = subsolution_exponent(params.n, params.p, params.q)
    if not (a_min - 1e-12 <= a < 1.0):
        raise ConfigError(f"supersolution exponent a={a} must lie in [{a_min:.6g}, 1)")
    b = supersolution_exponent(params.p, params.q)
    domain = Cusp(a=a, b=b)
    spec = BarrierSpec(
        family="supersolution_w",
        a=float(a),
        b=b,
        C=SUPER_C0,
        domain=domain,
        z0=np.zeros(2),
        normal=np.array([0.0, 1.0]),
        n=params.n,
        p=params.p,
        q=params.q,
    )
    return spec, domain
