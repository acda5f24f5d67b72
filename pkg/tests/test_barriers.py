"""Barrier families, their certification and the comparison checks."""
import numpy as np
import pytest

from lpdual_lab.barriers import (
    calibrate,
    comparison_check,
    cusp_lower_bound_check,
    fd_cross_check,
    grid_cross_check,
    make_subsolution,
    make_supersolution,
    subsolution_exponent,
    supersolution_exponent,
    upper_bound_check,
    verify_inequality,
    write_certificate,
)
from lpdual_lab.core.error import CalibrationError, ConfigError
from lpdual_lab.grid.field import ScalarField
from lpdual_lab.grid.lattice import build_grid
from lpdual_lab.models.params import ProblemParams
from lpdual_lab.oracle import paraboloid
from lpdual_lab.solvers import solve

BOTTOM = np.array([0.0, -1.0])


@pytest.fixture(scope="module")
def subsolution(unit_disk, singular_params):
    return make_subsolution(singular_params, unit_disk, BOTTOM)


@pytest.fixture(scope="module")
def cusp_setup(cusp_params):
    spec, domain = make_supersolution(cusp_params, 0.8)
    return spec, build_grid(domain, 33)


def test_exponents():
    assert subsolution_exponent(3, -2.0, 3.0) == pytest.approx(0.4)
    assert supersolution_exponent(-2.0, 3.0) == pytest.approx(0.4)
    assert subsolution_exponent(3, 0.0, 4.0) == pytest.approx(0.75)
    assert subsolution_exponent(3, 0.0, 3.0) == pytest.approx(2.0 / 3.0)
    assert supersolution_exponent(0.0, 3.0) == pytest.approx(2.0 / 3.0)


def test_families_need_singular_planar_charts(unit_disk, subcritical_params):
    with pytest.raises(ConfigError):
        make_subsolution(subcritical_params, unit_disk, BOTTOM)
    planar = ProblemParams(n=2, p=0.5, q=2.0, eps=0.1)
    with pytest.raises(ConfigError):
        make_subsolution(planar, unit_disk, BOTTOM)


def test_supersolution_exponent_range(singular_params, cusp_params):
    with pytest.raises(ConfigError):
        make_supersolution(singular_params, 0.3)
    with pytest.raises(ConfigError):
        make_supersolution(singular_params, 1.0)
    spec, domain = make_supersolution(singular_params, 0.8)
    assert spec.b == pytest.approx(0.4)
    assert domain.s == pytest.approx(2.0)
    # p = 0, q = 3: a may go down to 2/3 and the cusp is flatter
    with pytest.raises(ConfigError):
        make_supersolution(cusp_params, 0.6)
    spec, domain = make_supersolution(cusp_params, 0.8)
    assert spec.b == pytest.approx(2.0 / 3.0)
    assert domain.s == pytest.approx(10.0 / 3.0)


def test_subsolution_frame(subsolution):
    np.testing.assert_allclose(subsolution.normal, [0.0, 1.0], atol=1e-8)
    assert subsolution.a == pytest.approx(0.4)
    # C0 (1 + diam^2) on the unit disk
    assert subsolution.C == pytest.approx(5.0)
    assert subsolution.value(BOTTOM[None, :])[0] == pytest.approx(0.0)


def test_closed_form_derivatives(subsolution, grid33):
    check = fd_cross_check(subsolution, grid33)
    assert check["nodes"] > 0
    assert check["max_identity_error"] <= 1e-10
    assert check["max_gradient_error"] <= 1e-6
    assert check["max_relative_error"] <= 1e-6
    assert check["passed"]


def test_closed_form_derivatives_catch_rescaled_values(subsolution, grid33):
    class Shifted:
        def __init__(self, spec):
            self.spec = spec

        def __getattr__(self, name):
            return getattr(self.spec, name)

        def value(self, points):
            return self.spec.value(points) * 1.001

    check = fd_cross_check(Shifted(subsolution), grid33)
    assert check["max_gradient_error"] > 1e-6
    assert not check["passed"]


def test_grid_operators_agree_away_from_boundary(subsolution, grid65):
    check = grid_cross_check(subsolution, grid65)
    assert check["nodes"] > 0
    assert check["max_relative_error"] <= 2e-2


def test_subsolution_certifies_on_disk(subsolution, singular_params, grid33, tmp_path):
    cert = verify_inequality(subsolution, singular_params, grid33)
    assert cert.boundary_ok
    assert cert.passed
    summary = cert.summary()
    assert summary["failed_nodes"] == 0 and summary["worst_margin"] >= 0
    path = write_certificate(cert, tmp_path / "certificate.csv")
    assert path.read_text().splitlines()[0] == "node_index,x1,x2,margin"


def test_calibration_doubles_C(subsolution, singular_params, grid33):
    weak = subsolution.with_C(0.5)
    assert not verify_inequality(weak, singular_params, grid33).passed
    spec, cert = calibrate(weak, singular_params, grid33)
    assert cert.passed
    assert cert.doublings >= 1
    assert spec.C == pytest.approx(0.5 * 2**cert.doublings)
    with pytest.raises(CalibrationError):
        calibrate(weak, singular_params, grid33, max_doublings=0)


def test_supersolution_calibration(cusp_setup, cusp_params):
    spec, grid = cusp_setup
    calibrated, cert = calibrate(spec, cusp_params, grid)
    assert cert.passed
    assert calibrated.C <= spec.C
    check = fd_cross_check(calibrated, grid, min_height=0.2)
    assert check["max_identity_error"] <= 1e-10
    assert check["passed"]


def test_cusp_lower_bound_on_the_barrier_itself(cusp_setup):
    spec, grid = cusp_setup
    w = ScalarField(grid, spec.value(grid.points))
    # axis nodes at x2 = j / 16; seven of them lie in [0.1, 0.5]
    check = cusp_lower_bound_check(w, spec, (0.1, 0.5))
    assert check["window_nodes"] == 7
    assert check["dominates_w"]
    # |w| drops below (C/2) x2^a above 2^-5, so the window bound fails for w itself
    assert not check["half_constant"]
    assert check["min_gap_half_constant"] < 0
    assert check["half_constant_threshold"] == pytest.approx(2.0**-5)


def test_cusp_lower_bound_over_the_whole_window(cusp_setup):
    spec, grid = cusp_setup
    x2 = grid.points[:, 1]
    steeper = ScalarField(grid, -spec.C * x2**spec.a)
    check = cusp_lower_bound_check(steeper, spec, (0.1, 0.5))
    assert check["dominates_w"]
    assert check["half_constant"]
    assert check["min_gap_half_constant"] >= 0


def test_cusp_lower_bound_needs_enough_window_nodes(cusp_setup):
    spec, grid = cusp_setup
    x2 = grid.points[:, 1]
    steeper = ScalarField(grid, -spec.C * x2**spec.a)
    check = cusp_lower_bound_check(steeper, spec, (0.1, 0.2))
    assert check["window_nodes"] == 2
    assert not check["dominates_w"]
    assert not check["half_constant"]
    assert cusp_lower_bound_check(steeper, spec, (0.1, 0.2), min_nodes=2)["half_constant"]


def test_cusp_lower_bound_needs_supersolution(subsolution, grid33):
    with pytest.raises(ConfigError):
        cusp_lower_bound_check(ScalarField.zeros(grid33), subsolution, (0.1, 0.5))


def test_comparison_check(grid33):
    u = paraboloid(grid33)
    passed = comparison_check(u, u.scaled(2.0))
    assert passed["passed"] and passed["min_gap"] >= 0
    failed = comparison_check(u.scaled(2.0), u, roles="w >= u")
    assert not failed["passed"]
    assert failed["roles"] == "w >= u"
    assert failed["worst_point"] == pytest.approx([0.0, 0.0])


def test_upper_bound_for_singular_solution(grid33, singular_params):
    u, _report = solve(singular_params, grid33)
    check = upper_bound_check(u, singular_params, grid33, samples=2)
    assert check["a"] == pytest.approx(0.4)
    assert len(check["comparisons"]) == 2
    assert check["comparison_passed"]
    assert check["passed"]
