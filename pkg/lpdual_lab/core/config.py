import os
from pathlib import Path
from typing import Dict

REPORT_SCHEMA_VERSION = "1.0"

# Solver tolerances
DEFAULT_TOL_NEWTON = 1e-9
DEFAULT_TOL_CONVEX = 1e-8
DEFAULT_TOL_STEADY = 1e-6
DEFAULT_TOL_EIGEN = 1e-8
DEFAULT_TOL_CMP = 1e-10
DEFAULT_TOL_DESCENT = 1e-8

DEFAULT_MAX_NEWTON_ITERS = 200
DEFAULT_MAX_OUTER = 100
DEFAULT_MAX_LINE_SEARCH = 30
DEFAULT_MAX_DOUBLINGS = 40

# Eigenvalue floor inside log det
EIGEN_CLAMP = 1e-10

# Flow stepping
DT_MIN = 1e-14
DT_GROWTH = 1.2
DT_INIT_FACTOR = 0.1
DT_MAX_FACTOR = 2.0
DEFAULT_FLOW_MAX_STEPS = 200000

# Radial shooting
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
SHOOT_TOL = 1e-10

# Boundary fits: window [WINDOW_MIN_CELLS * dx, WINDOW_MAX_DIAM * diam]
WINDOW_MIN_CELLS = 3.0
WINDOW_MAX_DIAM = 0.1
MIN_FIT_SAMPLES = 10

DEFAULT_GRID_N = 65
MIN_GRID_N = 9


def get_data_dir() -> Path:
    """
    Get the base output directory from environment variable.
    - LPDUAL_DATA_DIR: base directory for run outputs
    Defaults to current working directory.
    """
    data_dir = os.getenv("LPDUAL_DATA_DIR")
    if data_dir:
        return Path(data_dir)
    return Path.cwd()


def get_log_level() -> str:
    """LPDUAL_LOG_LEVEL, default INFO."""
    return os.getenv("LPDUAL_LOG_LEVEL", "INFO").upper()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = float(raw)
    except ValueError:
        return default
    return value if value > 0 else default


def get_tolerances() -> Dict[str, float]:
    """
    Solver tolerances with environment overrides.
    - LPDUAL_TOL_NEWTON: L-infinity residual target of Newton solves (default 1e-9)
    - LPDUAL_TOL_CONVEX: allowed negative Hessian eigenvalue (default 1e-8)
    - LPDUAL_TOL_STEADY: flow steady-state threshold on sup|u_t| (default 1e-6)
    - LPDUAL_TOL_EIGEN: eigen iteration threshold on |delta lambda| (default 1e-8)
    - LPDUAL_TOL_CMP: comparison slack (default 1e-10)
    Non-positive or unparsable values fall back to the defaults.
    """
    return {
        "newton": _env_float("LPDUAL_TOL_NEWTON", DEFAULT_TOL_NEWTON),
        "convex": _env_float("LPDUAL_TOL_CONVEX", DEFAULT_TOL_CONVEX),
        "steady": _env_float("LPDUAL_TOL_STEADY", DEFAULT_TOL_STEADY),
        "eigen": _env_float("LPDUAL_TOL_EIGEN", DEFAULT_TOL_EIGEN),
        "cmp": _env_float("LPDUAL_TOL_CMP", DEFAULT_TOL_CMP),
        "descent": DEFAULT_TOL_DESCENT,
    }
