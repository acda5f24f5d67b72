"""Newton solves, the eigen iteration, continuation chains and the gradient flow."""
import numpy as np
import pytest

from lpdual_lab.core.error import ConfigError, DomainError
from lpdual_lab.functionals import PowerF, eval_Jeps
from lpdual_lab.geometry.domain import Disk
from lpdual_lab.grid.field import ScalarField
from lpdual_lab.grid.lattice import build_grid
from lpdual_lab.models.params import FlowSettings, ProblemParams, Tolerances
from lpdual_lab.oracle import paraboloid, radial_eigen
from lpdual_lab.solvers import (
    default_starts,
    eigen_solve,
    eps_continuation,
    eps_ladder_solve,
    estimate_blowup,
    flow_rhs,
    flow_run,
    flow_step,
    initial_guess,
    lower_bound_study,
    measure_star,
    multistart_uniqueness,
    newton_solve,
    rhs_eval,
    rhs_formula,
    s_continuation,
    s_values_from_eigenvalue,
    solve,
    start_flow,
    uniqueness_condition_check,
    write_history,
)


@pytest.fixture(scope="module")
def grid17(unit_disk):
    return build_grid(unit_disk, 17)


def test_paraboloid_is_recovered(grid33, paraboloid_params):
    u, report = solve(paraboloid_params, grid33)
    assert report["converged"]
    assert report["convexity_violations"] == 0
    assert u.distance(paraboloid(grid33)) <= 1e-6
    assert report["functionals"]["V_q"] > 0


def test_newton_rejects_positive_start(grid33, paraboloid_params):
    u0 = ScalarField.from_function(grid33, lambda x: 1.0 - np.sum(x**2, axis=1))
    with pytest.raises(DomainError):
        newton_solve(paraboloid_params, u0)


def test_subcritical_solution_is_unique(grid33, subcritical_params):
    starts = default_starts(grid33, subcritical_params)
    assert len(starts) == 3
    result = multistart_uniqueness(subcritical_params, grid33, starts)
    assert result["all_converged"]
    assert not result["errors"]
    assert len(result["distances"]) == 3
    assert result["max_distance"] <= 1e-6


def test_initial_guess_with_negative_energy(grid33, subcritical_params):
    u0 = initial_guess(grid33, subcritical_params, require_negative_energy=True)
    assert u0.admissible
    assert eval_Jeps(u0, subcritical_params) < 0


@pytest.mark.parametrize(
    "p, q, expected",
    [(2.0, 3.0, True), (1.0, 3.0, True), (-2.0, 3.0, True), (3.0, 2.0, False), (2.0, 2.0, False)],
)
def test_uniqueness_condition(p, q, expected):
    result = uniqueness_condition_check(3, p, q, samples=400, seed=1)
    assert result["holds"] is expected
    assert result["expected"] is (q > p)


def test_rhs_formula_domain():
    x = np.zeros((1, 2))
    with pytest.raises(DomainError):
        rhs_formula(x, np.array([0.5]), np.zeros((1, 2)), n=3, p=2.0, q=3.0)
    value = rhs_formula(x, np.array([-2.0]), np.zeros((1, 2)), n=3, p=2.0, q=2.0)
    # (-u)^(p-1) rho^(n-q) with rho = |u| at the origin
    assert value[0] == pytest.approx(4.0)


def test_eigen_requires_critical(grid33, subcritical_params):
    with pytest.raises(ConfigError):
        eigen_solve(subcritical_params, grid=grid33)


def test_eigenvalue_matches_radial_shooting(grid65, critical_params):
    tol = Tolerances(eigen=1e-7, newton=1e-8)
    lam, v, report = eigen_solve(critical_params, grid=grid65, tolerances=tol)
    assert report["converged"]
    assert v.sup_norm == pytest.approx(1.0)
    assert report["functionals"]["rayleigh"] == pytest.approx(lam, rel=1e-5)
    exact = radial_eigen(critical_params, 1.0)
    assert lam == pytest.approx(exact.lam, rel=0.02)


def test_eps_continuation_is_monotone(grid33):
    params = ProblemParams(n=3, p=-2.0, q=3.0, eps=0.1)
    result = eps_continuation(params, grid33, [0.1, 0.05, 0.025])
    assert result["all_converged"]
    assert result["eps"] == [0.1, 0.05, 0.025]
    assert result["monotone"]
    assert result["sup_norms"][-1] > result["sup_norms"][0]


def test_eps_continuation_validation(grid33, singular_params, subcritical_params):
    with pytest.raises(ConfigError):
        eps_continuation(subcritical_params, grid33, [0.1, 0.01])
    with pytest.raises(ConfigError):
        eps_continuation(singular_params, grid33, [0.01, 0.1])


def test_s_continuation_grows(grid33, critical_params):
    lam = radial_eigen(critical_params, 1.0).lam
    s_values = s_values_from_eigenvalue(lam, critical_params.p, (0.0, 0.3, 0.6))
    result = s_continuation(critical_params, grid33, s_values)
    assert result["all_converged"]
    assert result["increasing"]
    assert len(result["chain"]) == 3


def test_s_values_and_blowup_estimate():
    assert s_values_from_eigenvalue(4.0, 3.0, (0.0, 0.5, 1.0)) == pytest.approx([0.0, 1.0, 2.0])
    with pytest.raises(ConfigError):
        s_values_from_eigenvalue(4.0, 1.0, (0.5,))
    s = [0.0, 1.0, 2.0]
    assert estimate_blowup(s, [1.0 / (3.0 - x) for x in s]) == pytest.approx(3.0)
    assert estimate_blowup(s, [3.0, 2.0, 1.0]) is None
    assert estimate_blowup([0.0], [1.0]) is None


def test_measure_star():
    assert measure_star(0.5, 3, 3.0) == pytest.approx(0.25)
    # |U| > 1 with (n + q - 2) / (n - 1) = 1.5 < 2
    assert measure_star(4.0, 3, 2.0) == pytest.approx(8.0)


@pytest.mark.slow
def test_lower_bound_study():
    params = ProblemParams(n=3, p=-2.0, q=3.0, eps=0.05)
    domains = [Disk(radius=r) for r in (0.75, 1.0)]
    result = lower_bound_study(params, domains, 33)
    assert result["all_converged"]
    assert len(result["rows"]) == 2
    assert result["c"] > 0
    assert result["rows"][0]["holds"]
    assert result["rows"][1]["sup_norm"] > result["rows"][0]["sup_norm"]


def test_lower_bound_needs_two_domains(singular_params):
    with pytest.raises(ConfigError):
        lower_bound_study(singular_params, [Disk(radius=1.0)], 17)


def test_flow_descends(grid17, subcritical_params, tmp_path):
    u0 = initial_guess(grid17, subcritical_params, require_negative_energy=True)
    state, report = flow_run(subcritical_params, u0, settings=FlowSettings(max_steps=150))
    assert state.steps == report["iterations"]
    assert len(state.history) == state.steps + 1
    monitors = state.monitors
    assert monitors["descent"]
    assert monitors["negative"]
    assert state.energy <= state.history[0]["J_eps"] + 1e-8
    path = write_history(state, tmp_path / "history.csv")
    assert path.read_text().splitlines()[0] == "t,J_eps,sup_grad,sup_ut,min_u,residual"


def test_flow_with_F_reports_growth(grid17, critical_params):
    u0 = ScalarField(grid17, grid17.domain.defining_quadratic(grid17.points))
    F = PowerF(power=critical_params.p - 1.0)
    state, _report = flow_run(
        critical_params, u0.scaled(0.5), F=F, settings=FlowSettings(max_steps=40)
    )
    growth = state.monitors["growth"]
    assert growth["lambda"] is None and growth["within"] is None
    # p int_s^0 (-t)^(p-1) dt / (-s)^p = 1
    assert growth["max_ratio"] == pytest.approx(1.0)


def test_flow_regime_rules(grid17, critical_params, subcritical_params):
    u0 = ScalarField(grid17, grid17.domain.defining_quadratic(grid17.points))
    with pytest.raises(ConfigError):
        flow_run(critical_params, u0)
    with pytest.raises(ConfigError):
        flow_run(subcritical_params, u0, F=PowerF(power=1.0))


def test_rhs_eval_uses_the_density(paraboloid_params):
    rng = np.random.default_rng(3)
    x = rng.uniform(-1.0, 1.0, size=(20, 2))
    Du = rng.uniform(-2.0, 2.0, size=(20, 2))
    u = -rng.uniform(0.1, 1.0, size=20)
    np.testing.assert_allclose(rhs_eval(x, u, Du, paraboloid_params), 1.0, rtol=1e-14)

    singular = ProblemParams(n=3, p=0.0, q=3.0, eps=0.1)
    value = rhs_eval(np.zeros((1, 2)), np.array([-1.0]), np.zeros((1, 2)), singular)
    assert value[0] == pytest.approx(1.0 / 1.1)
    with pytest.raises(DomainError):
        rhs_eval(np.zeros((1, 2)), np.array([0.5]), np.zeros((1, 2)), singular)


def test_flow_step_keeps_the_exact_solution(grid33, paraboloid_params):
    u0 = paraboloid(grid33)
    state = start_flow(flow_rhs(paraboloid_params, u0), u0)
    assert state.sup_ut <= 1e-8
    step = flow_step(state, flow_rhs(paraboloid_params, u0), dt_max=10 * state.dt)
    assert step.steps == 1 and step.rejected == 0
    assert step.t == pytest.approx(state.dt)
    assert step.u.distance(u0) <= 1e-8


@pytest.mark.parametrize("scheme", ["linearized", "explicit"])
def test_flow_steps_descend(grid17, subcritical_params, scheme):
    tol = Tolerances()
    u0 = initial_guess(grid17, subcritical_params, require_negative_energy=True)
    rhs = flow_rhs(subcritical_params, u0)
    state = start_flow(rhs, u0, tol, scheme=scheme)
    dt_max = 50 * state.dt
    for _ in range(5):
        previous = state
        state = flow_step(state, rhs, dt_max=dt_max, tolerances=tol, scheme=scheme)
        assert state.energy <= previous.energy + tol.descent
        assert state.t > previous.t
        assert state.dt <= dt_max
        assert state.violations <= previous.violations
    assert len(state.history) == 6


def test_flow_rejects_unknown_schemes(grid17, subcritical_params):
    u0 = initial_guess(grid17, subcritical_params, require_negative_energy=True)
    rhs = flow_rhs(subcritical_params, u0)
    with pytest.raises(ConfigError):
        start_flow(rhs, u0, scheme="implicit")
    state = start_flow(rhs, u0)
    with pytest.raises(ConfigError):
        flow_step(state, rhs, dt_max=state.dt, scheme="crank-nicolson")


def test_linearized_flow_starts_from_the_mesh_size(grid17, grid33, subcritical_params):
    for grid in (grid17, grid33):
        u0 = initial_guess(grid, subcritical_params, require_negative_energy=True)
        state = start_flow(flow_rhs(subcritical_params, u0), u0)
        assert state.dt == pytest.approx(0.1 * grid.dx**2)


def test_flow_reaches_the_steady_state(grid33, flow_params):
    tol = Tolerances()
    u0 = initial_guess(grid33, flow_params, require_negative_energy=True)
    settings = FlowSettings(max_steps=2000, t_max=100.0)
    state, report = flow_run(flow_params, u0, settings=settings, tolerances=tol)
    assert report["converged"], report["status"]
    assert state.sup_ut <= tol.steady
    assert state.monitors["descent"]
    u, newton = newton_solve(flow_params, state.u, tolerances=tol)
    assert newton["converged"]
    assert state.u.distance(u) <= 1e-4


@pytest.mark.slow
def test_explicit_flow_descends_on_exact_offsets(grid33, flow_params):
    u0 = initial_guess(grid33, flow_params, require_negative_energy=True)
    settings = FlowSettings(max_steps=2000, scheme="explicit")
    state, report = flow_run(flow_params, u0, settings=settings)
    assert report["status"] in ("converged", "max_iters", "t_max")
    assert state.monitors["descent"]
    assert state.energy < state.history[0]["J_eps"]


def test_eps_ladder_walks_down_to_the_target(grid33):
    params = ProblemParams(n=3, p=0.0, q=3.0, eps=1e-3)
    u, report, ladder = eps_ladder_solve(params, grid33)
    assert report["converged"]
    assert ladder["reached"]
    assert ladder["eps"][0] == pytest.approx(0.1)
    assert ladder["eps"][-1] == pytest.approx(1e-3)
    assert all(b < a for a, b in zip(ladder["eps"], ladder["eps"][1:]))
    assert u.admissible


def test_eps_ladder_with_a_large_target_is_one_solve(grid33):
    params = ProblemParams(n=3, p=-2.0, q=3.0, eps=0.2)
    _u, report, ladder = eps_ladder_solve(params, grid33)
    assert report["converged"]
    assert ladder == {"eps": [0.2], "splits": 0, "reached": True}


def test_eps_ladder_validation(grid33, singular_params, subcritical_params):
    with pytest.raises(ConfigError):
        eps_ladder_solve(subcritical_params, grid33)
    with pytest.raises(ConfigError):
        eps_ladder_solve(singular_params, grid33, ratio=1.5)
