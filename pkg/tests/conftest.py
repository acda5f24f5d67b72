"""Shared fixtures: the unit disk, small grids and the standard parameter sets."""
from pathlib import Path

import pytest

from lpdual_lab.geometry.domain import Disk
from lpdual_lab.grid.lattice import build_grid
from lpdual_lab.models.params import ProblemParams

CONFIG_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture(scope="session")
def unit_disk():
    return Disk(radius=1.0)


@pytest.fixture(scope="session")
def grid33(unit_disk):
    return build_grid(unit_disk, 33)


@pytest.fixture(scope="session")
def grid65(unit_disk):
    return build_grid(unit_disk, 65)


@pytest.fixture(scope="session")
def paraboloid_params():
    """p = 1, q = n = 3, g = 1: the exact solution on the unit disk is (|x|^2 - 1) / 2."""
    return ProblemParams(n=3, p=1.0, q=3.0)


@pytest.fixture(scope="session")
def subcritical_params():
    return ProblemParams(n=3, p=2.0, q=3.0)


@pytest.fixture(scope="session")
def critical_params():
    return ProblemParams(n=3, p=2.0, q=2.0)


@pytest.fixture(scope="session")
def singular_params():
    return ProblemParams(n=3, p=-2.0, q=3.0, eps=1e-2)


@pytest.fixture(scope="session")
def cusp_params():
    """p = 0, q = 3: the singular instance of the cusp barrier study."""
    return ProblemParams(n=3, p=0.0, q=3.0, eps=1e-2)


@pytest.fixture(scope="session")
def flow_params():
    """p = 1, q = 4, eps = 0.1: the subcritical instance the flow is run on."""
    return ProblemParams(n=3, p=1.0, q=4.0, eps=0.1)


@pytest.fixture(scope="session")
def config_dir():
    return CONFIG_DIR
