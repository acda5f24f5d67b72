"""Cut-cell Cartesian grids, finite-difference operators and quadrature."""
from .lattice import Grid, build_grid
from .field import ScalarField
from .operators import DerivedQuantities, Stencils, differentiate
from .quadrature import CellQuadrature, integrate, node_weights
from .io import read_field_table, write_field_table, write_table

__all__ = [
    "Grid",
    "build_grid",
    "ScalarField",
    "DerivedQuantities",
    "Stencils",
    "differentiate",
    "CellQuadrature",
    "integrate",
    "node_weights",
    "read_field_table",
    "write_field_table",
    "write_table",
]
