"""Parameter models, regime table and report schemas."""
from .params import (
    BarrierSettings,
    ContinuationSettings,
    DensityConfig,
    DomainConfig,
    FlowSettings,
    GridSettings,
    HolderSettings,
    OracleSettings,
    ProblemParams,
    RunConfig,
    Tolerances,
)
from .regime import REGIME_INFO, Regime, classify_regime, validate_regime

__all__ = [
    "BarrierSettings",
    "ContinuationSettings",
    "DensityConfig",
    "DomainConfig",
    "FlowSettings",
    "GridSettings",
    "HolderSettings",
    "OracleSettings",
    "ProblemParams",
    "RunConfig",
    "Tolerances",
    "REGIME_INFO",
    "Regime",
    "classify_regime",
    "validate_regime",
]
