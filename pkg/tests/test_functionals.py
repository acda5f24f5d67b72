"""Chart q-volume, energies and the coercivity and Sobolev diagnostics."""
import math

import numpy as np
import pytest

from lpdual_lab.core.error import ConfigError, DomainError
from lpdual_lab.functionals import (
    PowerF,
    coercivity_constants,
    eps_constant,
    eval_Ieps,
    eval_invariant_I0,
    eval_Jeps,
    eval_JF,
    eval_Vq,
    first_variation_Vq,
    functional_report,
    integral_to_zero,
    rayleigh_lambda,
    sobolev_ratio_catalog,
    spherical_Vq,
)
from lpdual_lab.geometry.domain import Disk, polar_cap_measure
from lpdual_lab.grid.field import ScalarField
from lpdual_lab.grid.lattice import build_grid
from lpdual_lab.models.params import ProblemParams


@pytest.fixture(scope="module")
def paraboloid(grid65):
    return ScalarField.from_function(grid65, lambda x: 0.5 * (np.sum(x**2, axis=1) - 1.0))


def test_volume_of_paraboloid(paraboloid):
    # q = n: rho drops out and V_3 = (1/3) int (1 - |x|^2) / 2 = pi / 12
    assert eval_Vq(paraboloid, 3.0, 3) == pytest.approx(math.pi / 12, rel=1e-2)


def test_spherical_assembly_matches_chart(paraboloid):
    for q in (1.0, 2.5, 3.0, 4.0):
        assert spherical_Vq(paraboloid, q, 3) == pytest.approx(eval_Vq(paraboloid, q, 3), rel=1e-10)


def test_volume_homogeneity(paraboloid):
    q = 2.5
    assert eval_Vq(paraboloid.scaled(3.0), q, 3) == pytest.approx(
        3.0**q * eval_Vq(paraboloid, q, 3), rel=1e-10
    )


def test_invariant_is_polar_cap(paraboloid, unit_disk):
    assert eval_invariant_I0(paraboloid, 3) == pytest.approx(
        polar_cap_measure(unit_disk, 3), rel=0.02
    )


def test_invariant_ignores_scaling(paraboloid):
    assert eval_invariant_I0(paraboloid.scaled(0.1), 3) == pytest.approx(
        eval_invariant_I0(paraboloid, 3), rel=1e-10
    )


def test_volume_rejects_positive_fields(grid33):
    u = ScalarField.from_function(grid33, lambda x: 1.0 - np.sum(x**2, axis=1))
    with pytest.raises(DomainError):
        eval_Vq(u, 3.0, 3)
    with pytest.raises(DomainError):
        eval_Vq(u.scaled(-1.0), 0.0, 3)


def test_energies_differ_by_eps_constant(paraboloid):
    params = ProblemParams(n=3, p=-2.0, q=3.0, eps=0.05)
    gap = eval_Jeps(paraboloid, params) - eval_Ieps(paraboloid, params)
    assert gap == pytest.approx(-eps_constant(paraboloid.grid, params), rel=1e-10)
    # constant density: (1/p) eps^p |U|
    assert eps_constant(paraboloid.grid, params) == pytest.approx(
        0.05**-2.0 * math.pi / -2.0, rel=1e-4
    )


def test_energy_rejects_p_zero(paraboloid):
    params = ProblemParams(n=3, p=0.0, q=3.0, eps=0.1)
    with pytest.raises(DomainError):
        eval_Jeps(paraboloid, params)


def test_power_F_integral_matches_quadrature():
    F = PowerF(power=2.0, shift=0.5)
    u = np.array([-2.0, -0.5, 0.0])
    closed = integral_to_zero(F, u)
    np.testing.assert_allclose(closed, [0.5 * 2 + 8.0 / 3.0, 0.25 + 0.125 / 3.0, 0.0])
    numeric = integral_to_zero(lambda s: 0.5 + np.power(-s, 2.0), u)
    np.testing.assert_allclose(numeric, closed, rtol=1e-10, atol=1e-14)
    assert F.derivative(np.array([-2.0]))[0] == pytest.approx(-4.0)


def test_JF_with_identity_power_is_J0(paraboloid, critical_params):
    # F(s) = (-s)^(p-1) gives int_u^0 F = (-u)^p / p, the eps = 0 potential
    F = PowerF(power=critical_params.p - 1.0)
    assert eval_JF(paraboloid, critical_params, F) == pytest.approx(
        eval_Jeps(paraboloid, critical_params), rel=1e-10
    )


def test_rayleigh_quotient_is_scale_invariant(paraboloid, critical_params):
    lam = rayleigh_lambda(paraboloid, critical_params)
    assert lam > 0
    assert rayleigh_lambda(paraboloid.scaled(7.0), critical_params) == pytest.approx(lam, rel=1e-10)


def test_coercivity_constants_touch_envelope():
    c = coercivity_constants(a=1.0, b=1.0, p=3.0, q=2.0)
    assert c["sigma"] == pytest.approx(2.0 / 3.0)
    assert c["delta"] == pytest.approx(2.0 / 27.0)
    s = c["sigma"]
    assert s**2 - s**3 == pytest.approx(2 * c["delta"])
    with pytest.raises(DomainError):
        coercivity_constants(a=1.0, b=1.0, p=2.0, q=3.0)


def test_sobolev_catalog_bound(grid33):
    result = sobolev_ratio_catalog(grid33, q=3.0, n=3, count=14)
    assert result["count"] == 14
    assert result["passed"]
    with pytest.raises(ConfigError):
        sobolev_ratio_catalog(grid33, q=3.0, n=3, count=0)


def test_functional_report_fields(paraboloid, critical_params, paraboloid_params):
    report = functional_report(paraboloid, critical_params, F=PowerF(power=1.0))
    assert report["rayleigh"] is not None and report["J_F"] is not None
    plain = functional_report(paraboloid, paraboloid_params)
    assert plain["rayleigh"] is None
    assert plain["V_q"] == pytest.approx(math.pi / 12, rel=1e-2)


def test_first_variation_along_the_bump(paraboloid):
    psi = 1.0 - np.sum(paraboloid.points**2, axis=1)
    assert first_variation_Vq(paraboloid, psi, 3.0, 3) == pytest.approx(-math.pi / 2, rel=5e-3)
    assert first_variation_Vq(paraboloid, np.zeros_like(psi), 3.0, 3) == 0.0


def test_first_variation_in_the_radial_direction(paraboloid):
    # V_q is q-homogeneous, so delta V_q(u)[u] = q V_q(u) term by term
    u = paraboloid.scaled(1.5)
    for q in (1.5, 2.5, 4.0):
        assert first_variation_Vq(u, u, q, 3) == pytest.approx(q * eval_Vq(u, q, 3), rel=1e-12)


def _first_variation_gap(N, q=4.0, t=1e-5):
    grid = build_grid(Disk(radius=1.0), N)
    u = ScalarField.from_function(grid, lambda x: 0.5 * (np.sum(x**2, axis=1) - 1.0))
    psi = ScalarField.from_function(grid, lambda x: -(1.0 - np.sum(x**2, axis=1)) ** 2)
    plus = eval_Vq(u.with_values(u.values + t * psi.values), q, 3)
    minus = eval_Vq(u.with_values(u.values - t * psi.values), q, 3)
    central = (plus - minus) / (2.0 * t)
    exact = first_variation_Vq(u, psi, q, 3)
    return abs(exact - central) / abs(central)


@pytest.mark.slow
def test_first_variation_against_central_differences():
    coarse = _first_variation_gap(129)
    fine = _first_variation_gap(257)
    assert coarse <= 0.02
    assert fine < coarse


@pytest.mark.slow
def test_invariant_agrees_across_admissible_fields():
    grid = build_grid(Disk(radius=1.0), 129)
    target = polar_cap_measure(grid.domain, 3)
    quadratic = ScalarField.from_function(grid, lambda x: 0.5 * (np.sum(x**2, axis=1) - 1.0))
    r2 = np.sum(grid.points**2, axis=1)
    quartic = ScalarField(grid, 0.5 * (r2 - 1.0) + 0.25 * (r2**2 - 1.0))
    first = eval_invariant_I0(quadratic, 3)
    second = eval_invariant_I0(quartic, 3)
    assert first == pytest.approx(target, rel=0.02)
    assert second == pytest.approx(target, rel=0.02)
    assert second == pytest.approx(first, rel=0.02)
