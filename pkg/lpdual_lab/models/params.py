"""
Validated parameter models: one PDE instance plus the run configuration sections.
"""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from ..core.config import (
    DEFAULT_FLOW_MAX_STEPS,
    DEFAULT_GRID_N,
    DEFAULT_MAX_NEWTON_ITERS,
    DEFAULT_MAX_OUTER,
    MIN_GRID_N,
    get_tolerances,
)
from ..core.error import ConfigError
from .regime import Regime, validate_regime

SUBCOMMANDS = ("solve", "flow", "eigen", "continuation", "holder", "barriers", "oracle", "selftest")


class DensityConfig(BaseModel):
    """Density catalog entry: side, family and its parameters."""
    model_config = ConfigDict(frozen=True)

    side: Literal["euclidean", "spherical"] = "euclidean"
    family: Literal["constant", "bump", "pulled-back-constant"] = "constant"
    c: float = 1.0
    center: Tuple[float, ...] = (0.0, 0.0)
    width: float = 0.5
    amplitude: float = 0.0
    floor: float = 1.0
    pole: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_positive(self) -> "DensityConfig":
        if self.family in ("constant", "pulled-back-constant") and self.c <= 0:
            raise ValueError(f"density constant must be positive, got c={self.c}")
        if self.family == "bump":
            if self.floor <= 0 or self.amplitude < 0 or self.width <= 0:
                raise ValueError("bump density needs floor > 0, amplitude >= 0, width > 0")
        if self.family == "pulled-back-constant" and self.side != "euclidean":
            raise ValueError("pulled-back-constant is a euclidean-side family")
        return self


class ProblemParams(BaseModel):
    """
    Exponents (n, p, q), regularization eps and density of one PDE instance.

    The regime tag is optional on input; it is always resolved from (n, p, q)
    and an explicit tag must agree with it.
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(3, ge=2, le=3)
    p: float = 1.0
    q: float = 3.0
    eps: float = Field(0.0, ge=0.0)
    density: DensityConfig = DensityConfig()
    regime: Optional[Regime] = None

    _density_fn = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_regime(self) -> "ProblemParams":
        try:
            resolved = validate_regime(self.n, self.p, self.q, self.regime)
        except ConfigError as e:
            raise ValueError(str(e)) from e
        object.__setattr__(self, "regime", resolved)
        if self.p < 1 and self.eps <= 0:
            raise ValueError(f"eps must be positive when p < 1 (p={self.p})")
        return self

    @property
    def d(self) -> int:
        """Chart dimension n - 1."""
        return self.n - 1

    def g(self, points):
        """Euclidean-side density evaluated at chart points of shape (M, d)."""
        if self._density_fn is None:
            from ..geometry.density import make_density

            self._density_fn = make_density(self.density, self)
        return self._density_fn(points)

    def with_eps(self, eps: float) -> "ProblemParams":
        return self.model_validate({**self.model_dump(), "eps": eps})


class DomainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["disk", "polygon", "superellipse", "cusp"] = "disk"
    radius: float = Field(1.0, gt=0)
    center: Tuple[float, ...] = (0.0, 0.0)
    vertices: Tuple[Tuple[float, float], ...] = ()
    a1: float = Field(1.0, gt=0)
    a2: float = Field(1.0, gt=0)
    m: float = Field(4.0, ge=1.0)
    a: float = 0.8
    b: Optional[float] = None


class GridSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int = Field(DEFAULT_GRID_N, ge=MIN_GRID_N)
    min_offset: Optional[float] = Field(None, ge=0.0, le=1.0)
    # field table "x1,x2,u" used as Newton start (required for supercritical solves)
    initial: Optional[str] = None


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True)

    newton: float = Field(default_factory=lambda: get_tolerances()["newton"], gt=0)
    convex: float = Field(default_factory=lambda: get_tolerances()["convex"], gt=0)
    steady: float = Field(default_factory=lambda: get_tolerances()["steady"], gt=0)
    eigen: float = Field(default_factory=lambda: get_tolerances()["eigen"], gt=0)
    cmp: float = Field(default_factory=lambda: get_tolerances()["cmp"], gt=0)
    descent: float = Field(default_factory=lambda: get_tolerances()["descent"], gt=0)
    max_iters: int = Field(DEFAULT_MAX_NEWTON_ITERS, ge=1)
    max_outer: int = Field(DEFAULT_MAX_OUTER, ge=1)


class FlowSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_max: float = Field(20.0, gt=0)
    max_steps: int = Field(DEFAULT_FLOW_MAX_STEPS, ge=1)
    # linearized: backward Euler with the Newton Jacobian; explicit: forward Euler
    scheme: Literal["linearized", "explicit"] = "linearized"
    # critical flows with a general F(s) = f_shift + (-s)^f_power; None = main equation
    f_power: Optional[float] = None
    f_shift: float = Field(0.0, ge=0.0)


class ContinuationSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps_values: Tuple[float, ...] = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
    s_fractions: Tuple[float, ...] = (0.0, 0.3, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.93, 0.95, 0.97)

    @field_validator("eps_values")
    @classmethod
    def _strictly_decreasing(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not v or any(e <= 0 for e in v) or any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("eps_values must be positive and strictly decreasing")
        return v

    @field_validator("s_fractions")
    @classmethod
    def _strictly_increasing(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not v or v[0] < 0 or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("s_fractions must start at >= 0 and increase strictly")
        return v


class HolderSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    probe: Literal["ray", "scatter"] = "ray"
    point: Optional[Tuple[float, float]] = None
    direction: Optional[Tuple[float, float]] = None
    band: Optional[Tuple[float, float]] = None


class BarrierSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    boundary_point: Optional[Tuple[float, float]] = None
    boundary_samples: int = Field(4, ge=1)
    target_a: float = 0.8


class OracleSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    cap_theta: float = Field(0.7853981633974483, gt=0, lt=1.5707963267948966)
    cap_grid: int = Field(257, ge=MIN_GRID_N)


class RunConfig(BaseModel):
    """Everything one CLI invocation needs."""
    model_config = ConfigDict(frozen=True)

    subcommand: Literal[
        "solve", "flow", "eigen", "continuation", "holder", "barriers", "oracle", "selftest"
    ] = "solve"
    problem: ProblemParams = ProblemParams()
    domain: DomainConfig = DomainConfig()
    grid: GridSettings = GridSettings()
    tolerances: Tolerances = Field(default_factory=Tolerances)
    flow: FlowSettings = FlowSettings()
    continuation: ContinuationSettings = ContinuationSettings()
    holder: HolderSettings = HolderSettings()
    barriers: BarrierSettings = BarrierSettings()
    oracle: OracleSettings = OracleSettings()
    out: Optional[str] = None
    seed: int = 0

    def grid_min_offset(self) -> float:
        """Explicit setting, else exact boundary offsets (no demotion)."""
        if self.grid.min_offset is not None:
            return self.grid.min_offset
        return 0.0


def section_names() -> List[str]:
    return ["problem", "density", "domain", "grid", "tolerances", "flow", "continuation",
            "holder", "barriers", "oracle"]
