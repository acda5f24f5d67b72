"""
Text tables for fields, histories, profiles and certificates.
"""
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..core.error import GridError
from .field import ScalarField
from .lattice import Grid

# 17 significant digits round-trip a double exactly
FLOAT_FORMAT = "%.17g"

COORD_COLUMNS = ("x1", "x2")


def write_table(
    data: Union[pd.DataFrame, Dict[str, Sequence[float]], List[Dict[str, float]]],
    path: Union[str, Path],
    columns: Optional[Sequence[str]] = None,
) -> Path:
    """Write rows as CSV with full float precision."""
    df = data if isinstance(data, pd.DataFrame) else pd.DataFrame(data)
    if columns is not None:
        df = df.loc[:, list(columns)]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def field_frame(u: ScalarField) -> pd.DataFrame:
    cols = {COORD_COLUMNS[a]: u.points[:, a] for a in range(u.grid.dim)}
    cols["u"] = u.values
    return pd.DataFrame(cols)


def write_field_table(u: ScalarField, path: Union[str, Path]) -> Path:
    """'x1,x2,u' rows (or 'x1,u' on an interval), one per interior node."""
    return write_table(field_frame(u), path)


def read_field_table(path: Union[str, Path], grid: Grid, atol: float = 1e-12) -> ScalarField:
    """
    Read a field table written for ``grid``.

    Raises:
        GridError: node coordinates do not match the grid
    """
    df = pd.read_csv(path)
    coords = df.loc[:, list(COORD_COLUMNS[: grid.dim])].to_numpy(dtype=float)
    if coords.shape != grid.points.shape or not np.allclose(coords, grid.points, atol=atol):
        raise GridError(f"field table {path} does not match the grid nodes")
    return ScalarField(grid, df["u"].to_numpy(dtype=float))
