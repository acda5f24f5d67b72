"""lpdual-lab: numerical lab for the L_p dual Minkowski problem on the sphere."""
from .core.config import (
    DEFAULT_GRID_N,
    REPORT_SCHEMA_VERSION,
    get_data_dir,
    get_tolerances,
)
from .core.runner import main, run
from .geometry import Cusp, Disk, Polygon, Superellipse, make_domain
from .grid import ScalarField, build_grid
from .models import ProblemParams, Regime, RunConfig, Tolerances
from .solvers import eigen_solve, flow_run, newton_solve, solve

__all__ = [
    "main",
    "run",
    "DEFAULT_GRID_N",
    "REPORT_SCHEMA_VERSION",
    "get_data_dir",
    "get_tolerances",
    "ProblemParams",
    "Regime",
    "RunConfig",
    "Tolerances",
    "Disk",
    "Polygon",
    "Superellipse",
    "Cusp",
    "make_domain",
    "build_grid",
    "ScalarField",
    "solve",
    "newton_solve",
    "eigen_solve",
    "flow_run",
]
