"""
Regime table: which PDE instances the laboratory accepts and what it can run on them.
"""
from enum import Enum
from typing import Any, Dict, List, Optional

from ..core.error import ConfigError

EXPONENT_TOL = 1e-12


class Regime(str, Enum):
    SUBCRITICAL = "subcritical"
    SUPERCRITICAL = "supercritical"
    CRITICAL = "critical"
    SINGULAR = "singular"


REGIME_INFO: Dict[Regime, Dict[str, Any]] = {
    Regime.SUBCRITICAL: {
        "name": "Subcritical",
        "condition": "q > p >= 1",
        "description": "Unique non-zero convex solution; flow exists for all time and converges",
        "needs_eps": False,
        "capabilities": ["solve", "flow", "holder", "oracle"],
    },
    Regime.SUPERCRITICAL: {
        "name": "Supercritical",
        "condition": "p > q >= n",
        "description": "Mountain-pass regime; only solves from given initial data, I_eps reported",
        "needs_eps": False,
        "capabilities": ["solve"],
    },
    Regime.CRITICAL: {
        "name": "Critical",
        "condition": "p = q >= 1",
        "description": "Scale-invariant eigenvalue problem; solution unique up to scaling",
        "needs_eps": False,
        "capabilities": ["eigen", "continuation", "flow", "oracle"],
    },
    Regime.SINGULAR: {
        "name": "Singular",
        "condition": "p < 1 and q >= n",
        "description": "Boundary-singular RHS; eps-regularized solves, sharp Holder exponent",
        "needs_eps": True,
        "capabilities": ["solve", "continuation", "holder", "barriers", "oracle"],
    },
}


def regime_table_text() -> str:
    """One line per regime, used in configuration error messages."""
    return "; ".join(f"{info['name']}: {info['condition']}" for info in REGIME_INFO.values())


def classify_regime(n: int, p: float, q: float) -> Optional[Regime]:
    """
    Classify exponents into a regime.

    Returns:
        The regime, or None when (n, p, q) falls outside every row of the table
    """
    if p < 1 and q >= n:
        return Regime.SINGULAR
    if abs(p - q) <= EXPONENT_TOL and p >= 1:
        return Regime.CRITICAL
    if q > p >= 1:
        return Regime.SUBCRITICAL
    if p > q >= n:
        return Regime.SUPERCRITICAL
    return None


def validate_regime(n: int, p: float, q: float, tag: Optional[Regime] = None) -> Regime:
    """
    Resolve the regime for (n, p, q) and check an explicit tag against it.

    Raises:
        ConfigError: exponents outside the table, or a tag that disagrees with them
    """
    regime = classify_regime(n, p, q)
    if regime is None:
        raise ConfigError(
            f"(n, p, q) = ({n}, {p}, {q}) matches no regime. Regime table: {regime_table_text()}",
            details={"n": n, "p": p, "q": q},
        )
    if tag is not None and Regime(tag) != regime:
        raise ConfigError(
            f"Regime tag '{Regime(tag).value}' is inconsistent with (n, p, q) = ({n}, {p}, {q}), "
            f"which is {regime.value}. Regime table: {regime_table_text()}",
            details={"n": n, "p": p, "q": q, "tag": Regime(tag).value},
        )
    return regime


def supports(regime: Regime, capability: str) -> bool:
    return capability in REGIME_INFO[regime]["capabilities"]


def capabilities(regime: Regime) -> List[str]:
    return list(REGIME_INFO[regime]["capabilities"])
