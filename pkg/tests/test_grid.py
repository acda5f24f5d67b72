"""Lattice construction, finite differences, cut-cell quadrature and field tables."""
import math

import numpy as np
import pytest

from lpdual_lab.core.error import DomainError, GridError
from lpdual_lab.geometry.domain import Disk, Polygon
from lpdual_lab.grid.field import ScalarField
from lpdual_lab.grid.io import read_field_table, write_field_table, write_table
from lpdual_lab.grid.lattice import build_grid
from lpdual_lab.grid.operators import differentiate
from lpdual_lab.grid.quadrature import integrate, node_weights

TRIANGLE = Polygon(vertices=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))


def test_grid_nodes_are_interior(grid33, unit_disk):
    assert grid33.N == 33
    assert grid33.dx == pytest.approx(2.0 / 32)
    assert np.all(unit_disk.contains(grid33.points))
    counts = grid33.describe()["classes"]
    assert counts["interior"] + counts["boundary_adjacent"] == grid33.size
    assert counts["demoted"] == 0


def test_offsets_lie_in_unit_interval(grid33):
    assert grid33.theta_plus.min() > 0 and grid33.theta_plus.max() <= 1.0
    assert grid33.theta_minus.min() > 0 and grid33.theta_minus.max() <= 1.0
    np.testing.assert_allclose(
        np.linalg.norm(grid33.boundary_points, axis=1), 1.0, atol=1e-12
    )


def test_min_offset_demotes_nodes(unit_disk):
    exact = build_grid(unit_disk, 33)
    staircase = build_grid(unit_disk, 33, min_offset=1.0)
    assert staircase.size < exact.size
    assert staircase.describe()["classes"]["demoted"] > 0
    assert min(staircase.theta_plus.min(), staircase.theta_minus.min()) >= 1.0 - 1e-9


def test_grid_rejects_small_N(unit_disk):
    with pytest.raises(GridError):
        build_grid(unit_disk, 5)
    with pytest.raises(GridError):
        build_grid(unit_disk, 33, min_offset=1.5)


def test_derivatives_exact_on_quadratics(grid33):
    # u = x^2 + x y + 2 y^2 + x - 3 y - 1, with its own boundary values
    def u_fn(x):
        return x[:, 0] ** 2 + x[:, 0] * x[:, 1] + 2 * x[:, 1] ** 2 + x[:, 0] - 3 * x[:, 1] - 1

    u = ScalarField.from_function(grid33, u_fn)
    dq = differentiate(u, boundary_values=u_fn)
    x = grid33.points
    np.testing.assert_allclose(dq.grad[:, 0], 2 * x[:, 0] + x[:, 1] + 1, atol=1e-9)
    np.testing.assert_allclose(dq.grad[:, 1], x[:, 0] + 4 * x[:, 1] - 3, atol=1e-9)
    np.testing.assert_allclose(dq.hess[:, 0, 0], 2.0, atol=1e-8)
    np.testing.assert_allclose(dq.hess[:, 1, 1], 4.0, atol=1e-8)
    np.testing.assert_allclose(dq.hess[:, 0, 1], 1.0, atol=1e-8)
    np.testing.assert_allclose(dq.det, 7.0, atol=1e-7)


def test_paraboloid_derived_quantities(grid33):
    u = ScalarField.from_function(grid33, lambda x: 0.5 * (np.sum(x**2, axis=1) - 1.0))
    dq = differentiate(u)
    x = grid33.points
    np.testing.assert_allclose(dq.det, 1.0, atol=1e-8)
    np.testing.assert_allclose(dq.min_eig, 1.0, atol=1e-8)
    # u* = x.Du - u = (|x|^2 + 1) / 2
    np.testing.assert_allclose(dq.u_star, 0.5 * (np.sum(x**2, axis=1) + 1.0), atol=1e-9)
    assert dq.convexity_violations(1e-8) == 0


def test_concave_field_counts_violations(grid33):
    u = ScalarField.from_function(grid33, lambda x: -0.5 * (np.sum(x**2, axis=1) - 1.0))
    assert differentiate(u).convexity_violations(1e-8) == grid33.size


def test_quadrature_areas(grid65, unit_disk):
    assert grid65.quadrature.total_area == pytest.approx(math.pi, rel=1e-4)
    assert integrate(grid65, lambda c: np.ones(c.shape[0])) == pytest.approx(math.pi, rel=1e-4)
    # int_disk |x|^2 = pi / 2
    assert integrate(grid65, lambda c: np.sum(c**2, axis=1)) == pytest.approx(
        math.pi / 2, rel=1e-3
    )
    assert node_weights(grid65).sum() < math.pi


def test_quadrature_on_triangle():
    grid = build_grid(TRIANGLE, 65)
    assert integrate(grid, lambda c: np.ones(c.shape[0])) == pytest.approx(0.5, rel=1e-4)
    # int_T x = 1/6
    assert integrate(grid, lambda c: c[:, 0]) == pytest.approx(1.0 / 6.0, rel=1e-3)


def test_boundary_trace_adds_uncovered_cells(grid33):
    zero = np.zeros(grid33.size)
    assert integrate(grid33, zero) == 0.0
    uncovered = grid33.quadrature.total_area - node_weights(grid33).sum()
    assert integrate(grid33, zero, boundary_trace=2.0) == pytest.approx(2.0 * uncovered)


def test_field_rules(grid33):
    with pytest.raises(DomainError):
        ScalarField(grid33, np.zeros(grid33.size - 1))
    with pytest.raises(DomainError):
        ScalarField(grid33, np.full(grid33.size, np.nan))
    u = ScalarField.from_function(grid33, lambda x: np.sum(x**2, axis=1) - 1.0)
    assert u.admissible
    assert u.normalized().sup_norm == pytest.approx(1.0)
    assert u.scaled(2.0).distance(u) == pytest.approx(u.sup_norm)
    assert u.node_value([0.0, 0.0]) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        u.values[0] = 1.0


def test_field_table_round_trip(tmp_path, grid33):
    u = ScalarField.from_function(grid33, lambda x: np.sin(x[:, 0]) * np.cos(3 * x[:, 1]) - 2.0)
    path = write_field_table(u, tmp_path / "field.csv")
    assert path.read_text().splitlines()[0] == "x1,x2,u"
    back = read_field_table(path, grid33)
    np.testing.assert_allclose(back.values, u.values, rtol=0, atol=1e-15)


def test_field_table_rejects_other_grid(tmp_path, grid33):
    u = ScalarField.zeros(grid33)
    path = write_field_table(u, tmp_path / "field.csv")
    with pytest.raises(GridError):
        read_field_table(path, build_grid(Disk(radius=1.0), 17))


def test_write_table_keeps_column_order(tmp_path):
    path = write_table([{"b": 1.0, "a": 2.0}], tmp_path / "t.csv", columns=["a", "b"])
    assert path.read_text().splitlines() == ["a,b", "2,1"]
