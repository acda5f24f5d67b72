"""Exponent fits, the scaling identity and refinement studies."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpdual_lab.analysis import (
    RayProbe,
    ScatterProbe,
    band_check,
    convergence_study,
    fit_boundary_exponent,
    is_radial_instance,
    orders,
    scaling_exponent,
    scaling_identity_check,
    split_window_check,
    uniqueness_sweep,
    write_fit_profile,
)
from lpdual_lab.core.error import ConfigError, GridError
from lpdual_lab.geometry.domain import Disk, Polygon
from lpdual_lab.grid.field import ScalarField
from lpdual_lab.grid.lattice import build_grid
from lpdual_lab.models.params import DensityConfig, ProblemParams

WINDOW = (0.05, 0.4)


@pytest.fixture(scope="module")
def power_field(unit_disk):
    """-(1 - |x|)^0.6: an exact power of the boundary distance."""
    grid = build_grid(unit_disk, 129)
    return ScalarField(grid, -grid.boundary_distance**0.6)


def test_ray_fit_recovers_power(power_field):
    fit = fit_boundary_exponent(power_field, RayProbe(), WINDOW)
    assert fit["slope"] == pytest.approx(0.6, abs=1e-9)
    assert fit["r2"] == pytest.approx(1.0)
    assert fit["samples"] >= 10
    assert fit["probe"]["kind"] == "ray"
    np.testing.assert_allclose(fit["probe"]["point"], [1.0, 0.0], atol=1e-12)
    assert band_check(fit, (0.55, 0.65), min_r2=0.99)
    assert not band_check(fit, (0.62, 0.85))


def test_scatter_fit_recovers_power(power_field):
    fit = fit_boundary_exponent(power_field, ScatterProbe(), WINDOW)
    assert fit["slope"] == pytest.approx(0.6, abs=1e-9)
    assert fit["samples"] > 100


def test_fit_window_rules(power_field):
    with pytest.raises(ConfigError):
        fit_boundary_exponent(power_field, RayProbe(), (0.01, 0.4))
    with pytest.raises(GridError):
        fit_boundary_exponent(power_field, RayProbe(), (0.05, 0.06))


def test_split_window_agrees_on_pure_power(power_field):
    check = split_window_check(power_field, RayProbe(), WINDOW)
    assert check["binding"]
    assert check["difference"] <= 1e-8
    assert check["passed"]


def test_fit_profile_table(power_field, tmp_path):
    path = write_fit_profile(power_field, tmp_path / "fit.csv", RayProbe(), WINDOW)
    lines = path.read_text().splitlines()
    assert lines[0] == "d,abs_u"
    d = [float(line.split(",")[0]) for line in lines[1:]]
    assert d == sorted(d)


def test_ray_probe_rejects_polygon_corners():
    square = Polygon(vertices=((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)))
    grid = build_grid(square, 33)
    with pytest.raises(ConfigError):
        RayProbe(point=(1.0, 1.0), direction=(-1.0, -1.0)).select(grid)
    assert RayProbe().select(grid).sum() > 0


def test_scaling_exponent():
    assert scaling_exponent(3, 2.0, 3.0) == 1.0
    assert scaling_exponent(3, -2.0, 3.0) == -3.0


@settings(max_examples=20, deadline=None)
@given(
    p=st.floats(min_value=1.0, max_value=4.0),
    gap=st.floats(min_value=0.1, max_value=3.0),
    seed=st.integers(min_value=0, max_value=1000),
)
def test_scaling_identity_holds(p, gap, seed):
    params = ProblemParams(n=3, p=p, q=p + gap)
    result = scaling_identity_check(params, trials=200, seed=seed)
    assert result["passed"]
    assert result["uniqueness"]["holds"]


def test_scaling_identity_critical(critical_params):
    result = scaling_identity_check(critical_params, trials=500)
    assert result["passed"]
    assert not result["uniqueness"]["holds"]


def test_uniqueness_sweep():
    result = uniqueness_sweep(samples=300)
    assert result["passed"]
    assert len(result["rows"]) == 25
    assert all(row["agrees"] for row in result["rows"])


def test_radial_instance_detection(paraboloid_params):
    assert is_radial_instance(paraboloid_params, Disk(radius=1.0))
    assert not is_radial_instance(paraboloid_params, Disk(radius=1.0, center=(0.2, 0.0)))
    triangle = Polygon(vertices=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))
    assert not is_radial_instance(paraboloid_params, triangle)
    shifted = ProblemParams(
        n=3, p=1.0, q=3.0,
        density=DensityConfig(family="bump", center=(0.3, 0.0), amplitude=1.0),
    )
    assert not is_radial_instance(shifted, Disk(radius=1.0))


def test_paraboloid_refinement(paraboloid_params):
    study = convergence_study(paraboloid_params, [33, 17])
    assert study["reference"] == "paraboloid"
    assert [row["N"] for row in study["rows"]] == [17, 33]
    assert all(row["converged"] for row in study["rows"])
    assert all(row["error_linf"] <= 1e-6 for row in study["rows"])
    assert study["V_q_reference"] == pytest.approx(np.pi / 12, rel=1e-8)
    assert [N for N, _ in orders(study)] == [33]
    assert study["rows"][1]["V_q_error"] < 0.02
