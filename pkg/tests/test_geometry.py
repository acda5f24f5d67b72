"""Domains, the chart map and the density catalog."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpdual_lab.core.error import ConfigError, DomainError
from lpdual_lab.geometry.chart import (
    ChartMap,
    chart_point,
    field_to_support,
    field_values,
    support_to_field,
    support_values,
)
from lpdual_lab.geometry.density import (
    BumpDensity,
    ConstantDensity,
    Density,
    make_density,
    pull_back_density,
    push_forward_density,
)
from lpdual_lab.geometry.domain import (
    Cusp,
    Disk,
    Polygon,
    Superellipse,
    make_domain,
    polar_cap_measure,
)
from lpdual_lab.grid.field import ScalarField
from lpdual_lab.models.params import DensityConfig, DomainConfig, ProblemParams

coord = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
unit = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)

SQUARE = Polygon(vertices=((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)))


def test_disk_queries(unit_disk):
    pts = np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 0.0], [2.0, 0.0]])
    assert unit_disk.contains(pts).tolist() == [True, True, False, False]
    assert unit_disk.measure == pytest.approx(math.pi)
    assert unit_disk.diameter == 2.0
    np.testing.assert_allclose(unit_disk.gauge(pts), [0.0, math.sqrt(0.5), 1.0, 2.0])
    np.testing.assert_allclose(unit_disk.defining_quadratic(pts[:1]), [-1.0])
    np.testing.assert_allclose(unit_disk.inward_normal(np.array([0.0, 1.0])), [0.0, -1.0])


def test_boundary_points_are_on_the_boundary():
    domains = [Disk(radius=0.7, center=(0.1, -0.2)), SQUARE, Superellipse(a1=1.0, a2=0.6, m=4.0)]
    for domain in domains:
        z = domain.sample_boundary(12)
        assert np.max(domain.boundary_distance(z)) < 1e-3
        np.testing.assert_allclose(domain.gauge(z), 1.0, atol=1e-6)


def test_polygon_rejects_clockwise_vertices():
    with pytest.raises(ConfigError):
        Polygon(vertices=((0.0, 0.0), (0.0, 1.0), (1.0, 0.0)))


def test_polygon_measure_and_gauge():
    assert SQUARE.measure == pytest.approx(4.0)
    assert SQUARE.diameter == pytest.approx(2.0 * math.sqrt(2.0))
    np.testing.assert_allclose(SQUARE.gauge(np.array([[0.5, 0.25], [-1.0, 0.3]])), [0.5, 1.0])


def test_superellipse_measure_reduces_to_disk():
    assert Superellipse(a1=1.0, a2=1.0, m=2.0).measure == pytest.approx(math.pi)


def test_cusp_requires_profile_exponent_at_least_one():
    with pytest.raises(ConfigError):
        Cusp(a=0.5, b=0.25)
    cusp = Cusp(a=0.8, b=0.4)
    assert cusp.s == pytest.approx(2.0)
    assert cusp.tangent_abscissa == pytest.approx(1.0 / 3.0)


@settings(max_examples=200, deadline=None)
@given(x1=unit, x2=st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_cusp_hull_contains_literal_region(x1, x2):
    cusp = Cusp(a=0.8, b=0.4)
    point = np.array([[x1, x2]])
    if cusp.in_literal_region(point)[0]:
        assert cusp.contains(point)[0]


def test_make_domain_from_config():
    disk = make_domain(DomainConfig(kind="disk", radius=2.0), dim=2)
    assert isinstance(disk, Disk) and disk.radius == 2.0
    interval = make_domain(DomainConfig(kind="disk"), dim=1)
    assert interval.dim == 1 and interval.measure == 2.0
    with pytest.raises(ConfigError):
        make_domain(DomainConfig(kind="cusp"), dim=2)
    with pytest.raises(ConfigError):
        make_domain(DomainConfig(kind="polygon", vertices=((0, 0), (1, 0), (0, 1))), dim=1)


def test_polar_cap_measure_closed_form():
    assert polar_cap_measure(Disk(radius=1.0), 3) == pytest.approx(
        2.0 * math.pi * (1.0 - 1.0 / math.sqrt(2.0)), rel=1e-12
    )
    R = 0.5
    assert polar_cap_measure(Disk(radius=R), 3) == pytest.approx(
        2.0 * math.pi * (1.0 - R / math.sqrt(1.0 + R * R)), rel=1e-12
    )
    with pytest.raises(ConfigError):
        polar_cap_measure(SQUARE, 3)


@settings(max_examples=100, deadline=None)
@given(x=st.lists(coord, min_size=2, max_size=2))
def test_chart_point_is_on_the_unit_sphere(x):
    y = chart_point(np.array(x))
    assert np.linalg.norm(y) == pytest.approx(1.0, abs=1e-12)
    assert y[-1] > 0


@settings(max_examples=100, deadline=None)
@given(
    x=st.lists(coord, min_size=2, max_size=2),
    pole=st.lists(unit, min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 0.1),
)
def test_chart_round_trip_with_arbitrary_pole(x, pole):
    chart = ChartMap(n=3, pole=pole)
    x = np.array(x)
    back = chart.chart_inverse(chart.chart_point(x))
    np.testing.assert_allclose(back, x, atol=1e-9)


def test_chart_inverse_rejects_lower_hemisphere():
    with pytest.raises(DomainError):
        ChartMap(n=3).chart_inverse(np.array([0.0, 0.0, -1.0]))


def test_volume_element_and_support_conversion():
    chart = ChartMap(n=3)
    x = np.array([[0.0, 0.0], [1.0, 1.0]])
    np.testing.assert_allclose(chart.volume_element(x), [1.0, 3.0**-1.5])
    u = np.array([-1.0, -0.5])
    np.testing.assert_allclose(field_values(x, support_values(x, u)), u)


def test_pull_back_and_push_forward_are_inverse():
    params = ProblemParams(n=3, p=2.0, q=3.0)
    f = BumpDensity(center=(0.2, 0.1, 1.0), width=0.5, amplitude=1.0, floor=0.5, side="spherical")
    g = pull_back_density(f, params)
    x = np.array([[0.0, 0.0], [0.3, -0.4], [1.5, 0.2]])
    weight = (1.0 + np.sum(x**2, axis=1)) ** (-(3 + 2.0) / 2.0)
    np.testing.assert_allclose(g(x), f(chart_point(x)) * weight)
    assert push_forward_density(g, params) is f

    g_flat = ConstantDensity(2.0)
    f_flat = push_forward_density(g_flat, params)
    y = chart_point(x)
    np.testing.assert_allclose(f_flat(y) * weight, 2.0)


def test_pull_back_rejects_euclidean_input():
    with pytest.raises(ConfigError):
        pull_back_density(ConstantDensity(1.0), ProblemParams())


def test_support_of_the_unit_sphere_gauge(grid33):
    u = ScalarField.from_function(grid33, lambda x: -np.sqrt(1.0 + np.sum(x**2, axis=1)))
    h = field_to_support(u)
    np.testing.assert_allclose(h.values, -1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(h.sphere_points, axis=1), 1.0, atol=1e-12)
    assert h.admissible
    assert not np.any(h.boundary_values())
    back = support_to_field(h)
    assert back.distance(u) <= 1e-12


def test_density_base_declares_the_interface():
    with pytest.raises(TypeError):
        Density()

    class ValuesOnly(Density):
        def __call__(self, points):
            return np.ones(np.atleast_2d(points).shape[0])

    with pytest.raises(TypeError):
        ValuesOnly()


def test_make_density_reads_the_exponents_of_the_problem():
    params = ProblemParams(n=3, p=2.0, q=3.0, density=DensityConfig(family="pulled-back-constant"))
    g = make_density(params.density, params)
    x = np.array([[0.0, 0.0], [0.5, 0.5]])
    np.testing.assert_allclose(g(x), (1.0 + np.sum(x**2, axis=1)) ** (-2.5))
    np.testing.assert_allclose(params.g(x), g(x))
