"""
One pipeline per CLI subcommand.

A pipeline reads the run configuration from a RunContext, writes its tables
into the output directory, records property verdicts on the context and
returns the JSON-ready results block of the report.
"""
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..analysis.exponent import (
    RayProbe,
    ScatterProbe,
    band_check,
    default_window,
    fit_boundary_exponent,
    split_window_check,
    write_fit_profile,
)
from ..analysis.convergence import is_radial_instance
from ..analysis.scaling import scaling_identity_check, uniqueness_sweep
from ..barriers.certify import (
    calibrate,
    comparison_check,
    cusp_lower_bound_check,
    fd_cross_check,
    upper_bound_check,
    write_certificate,
)
from ..barriers.families import (
    make_subsolution,
    make_supersolution,
    subsolution_exponent,
    supersolution_exponent,
)
from ..functionals.energy import PowerF, functional_report
from ..geometry.chart import ChartMap, field_to_support, support_to_field
from ..geometry.domain import BaseDomain, Disk, make_domain
from ..grid.field import ScalarField
from ..grid.io import read_field_table, write_field_table
from ..grid.lattice import Grid, build_grid
from ..grid.operators import differentiate
from ..models.params import ProblemParams, RunConfig, Tolerances
from ..models.regime import Regime
from ..models.schema import PropertyVerdict, SolveReport, build_property
from ..oracle.radial import (
    RadialProfile,
    exponent_from_profile,
    paraboloid,
    radial_eigen,
    radial_solve,
    write_profile,
)
from ..oracle.sphere import cap_area_check, invariant_check
from ..solvers.continuation import (
    eps_continuation,
    eps_ladder_solve,
    lower_bound_study,
    s_continuation,
    s_values_from_eigenvalue,
)
from ..solvers.eigen import eigen_solve
from ..solvers.flow import flow_rhs, flow_run, write_history
from ..solvers.newton import (
    default_starts,
    initial_guess,
    multistart_uniqueness,
    newton_solve,
    solve,
)
from .error import ConfigError
from .logger import get_logger
from .parallel import run_jobs

logger = get_logger(__name__)

GOLDEN_TOL = 5e-4
UNIQUENESS_TOL = 1e-6
FLOW_NEWTON_TOL = 1e-4
ORACLE_H2_FACTOR = 4.0
EIGEN_LAMBDA_TOL = 1e-6
EIGEN_FIELD_TOL = 1e-4
EIGEN_ORACLE_TOL = 0.01
S_ESTIMATE_TOL = 0.05
LOWER_BOUND_POWER_TOL = 0.2
LOWER_BOUND_RADII = (0.5, 0.75, 1.0)
CAP_TOL = 1e-3
PROFILE_TOL = 1e-9
INTEGRATOR_AGREEMENT_TOL = 1e-8
LOOSE_RTOL = 1e-10
LOOSE_ATOL = 1e-12
PROFILE_EXPONENT_TOL = 0.03
PROFILE_EXPONENT_MAX_EPS = 1e-5
CUSP_BAND = (0.62, 0.85)
CUSP_MIN_R2 = 0.99
INVARIANT_TOL = 0.02
ROUND_TRIP_TOL = 1e-12


@dataclass
class RunContext:
    config: RunConfig
    out_dir: Path
    properties: List[PropertyVerdict] = field(default_factory=list)
    files: List[str] = field(default_factory=list)

    @property
    def params(self) -> ProblemParams:
        return self.config.problem

    @property
    def tol(self) -> Tolerances:
        return self.config.tolerances

    @cached_property
    def domain(self) -> BaseDomain:
        dc = self.config.domain
        if dc.kind == "cusp" and dc.b is None:
            dc = dc.model_copy(update={"b": supersolution_exponent(self.params.p, self.params.q)})
        return make_domain(dc, self.params.d)

    @cached_property
    def grid(self) -> Grid:
        return build_grid(self.domain, self.config.grid.N, self.config.grid_min_offset())

    def check(
        self,
        name: str,
        passed: bool,
        *,
        value: Optional[float] = None,
        threshold: Optional[float] = None,
        detail: str = "",
    ) -> bool:
        verdict = build_property(name, passed, value=value, threshold=threshold, detail=detail)
        self.properties.append(verdict)
        if not verdict["passed"]:
            logger.warning(f"Property {name} failed: value={value}, threshold={threshold} {detail}")
        return verdict["passed"]

    def converged(self, name: str, report: SolveReport) -> bool:
        return self.check(
            f"converged.{name}",
            report["converged"],
            value=report["residual"],
            detail=report["status"],
        )

    def write_field(self, u: ScalarField, name: str = "field.csv") -> None:
        write_field_table(u, self.out_dir / name)
        self.files.append(name)

    def note_file(self, name: str) -> Path:
        self.files.append(name)
        return self.out_dir / name


Pipeline = Callable[[RunContext], Dict[str, Any]]


def _centered_disk(domain: BaseDomain) -> bool:
    return isinstance(domain, Disk) and not np.any(np.abs(np.asarray(domain.center)) > 0)


def _is_paraboloid(params: ProblemParams, domain: BaseDomain) -> bool:
    density = params.density
    return (
        _centered_disk(domain)
        and params.p == 1
        and params.q == params.n
        and density.side == "euclidean"
        and density.family == "constant"
        and density.c == 1.0
    )


def _solve_fresh(
    params: ProblemParams, grid: Grid, tol: Tolerances
) -> Tuple[ScalarField, SolveReport, Optional[Dict[str, Any]]]:
    """Scanned start; singular solves that fail directly walk eps down from above."""
    u, report = solve(params, grid, tol)
    if report["converged"] or params.regime != Regime.SINGULAR:
        return u, report, None
    logger.info(f"Direct solve stopped with {report['status']}; trying the eps ladder")
    return eps_ladder_solve(params, grid, tolerances=tol)


def _solve_configured(
    ctx: RunContext,
) -> Tuple[ScalarField, SolveReport, Optional[Dict[str, Any]]]:
    params, grid = ctx.params, ctx.grid
    if ctx.config.grid.initial:
        u0 = read_field_table(ctx.config.grid.initial, grid)
        u, report = newton_solve(params, u0, tolerances=ctx.tol)
        return u, report, None
    if params.regime == Regime.SUPERCRITICAL:
        raise ConfigError("supercritical solves need an initial field table ([grid] initial)")
    return _solve_fresh(params, grid, ctx.tol)


def _gated(ctx: RunContext, name: str, converged: bool, passed: bool, **kwargs: Any) -> bool:
    """A check on a solution only passes when that solution converged."""
    if not converged:
        return ctx.check(name, False, value=kwargs.get("value"),
                         threshold=kwargs.get("threshold"), detail="solve did not converge")
    return ctx.check(name, passed, **kwargs)


def run_solve(ctx: RunContext) -> Dict[str, Any]:
    params, grid, tol = ctx.params, ctx.grid, ctx.tol
    u, report, ladder = _solve_configured(ctx)
    ctx.converged("newton", report)
    ctx.check("residual_linf", report["residual"] <= tol.newton,
              value=report["residual"], threshold=tol.newton)
    ctx.check("admissible", u.admissible, value=float(u.values.max()), threshold=0.0)
    min_eig = float(differentiate(u).min_eig.min())
    ctx.check("convex", min_eig >= -tol.convex, value=min_eig, threshold=-tol.convex)
    ctx.write_field(u)

    results: Dict[str, Any] = {
        "solve": report,
        "functionals": functional_report(u, params),
        "sup_norm": u.sup_norm,
    }
    if ladder is not None:
        results["eps_ladder"] = ladder
    if _is_paraboloid(params, grid.domain):
        error = u.distance(paraboloid(grid, grid.domain.radius))
        results["paraboloid_error"] = error
        ctx.check("golden_paraboloid", error <= GOLDEN_TOL, value=error, threshold=GOLDEN_TOL)
    elif is_radial_instance(params, grid.domain) and params.regime != Regime.SUPERCRITICAL:
        profile = radial_solve(params, grid.domain.radius)
        distance = u.distance(profile.on_grid(grid))
        threshold = ORACLE_H2_FACTOR * grid.dx**2
        results["oracle_distance"] = distance
        _gated(ctx, "matches_oracle", report["converged"], distance <= threshold,
               value=distance, threshold=threshold)
    if params.regime == Regime.SUBCRITICAL:
        study = multistart_uniqueness(params, grid, default_starts(grid, params), tol)
        results["uniqueness"] = {
            "reports": study["reports"],
            "distances": study["distances"],
            "max_distance": study["max_distance"],
        }
        ctx.check("uniqueness", study["all_converged"] and study["max_distance"] <= UNIQUENESS_TOL,
                  value=study["max_distance"], threshold=UNIQUENESS_TOL)
    return results


def run_flow(ctx: RunContext) -> Dict[str, Any]:
    params, grid, tol = ctx.params, ctx.grid, ctx.tol
    settings = ctx.config.flow
    F = None if settings.f_power is None else PowerF(settings.f_power, settings.f_shift)
    lam = None
    if F is not None:
        lam, _, eigen_report = eigen_solve(params, grid=grid, tolerances=tol)
        ctx.converged("eigen", eigen_report)
    rhs = flow_rhs(params, ScalarField.zeros(grid), F)
    u0 = initial_guess(grid, params, rhs=rhs, require_negative_energy=True)
    state, report = flow_run(params, u0, F=F, settings=settings, tolerances=tol, lam=lam)
    write_history(state, ctx.note_file("history.csv"))
    ctx.write_field(state.u)

    monitors = state.monitors
    ctx.converged("flow", report)
    ctx.check("descent", monitors["descent"], value=monitors["max_energy_rise"],
              threshold=tol.descent)
    ctx.check("negative", monitors["negative"])
    ctx.check("non_collapse", monitors["non_collapse"], value=monitors["min_sup_norm"])
    ctx.check("gradient_bound", monitors["gradient_bound"])
    ctx.check("ut_bound", monitors["ut_bound"])
    results: Dict[str, Any] = {
        "flow": report,
        "monitors": monitors,
        "accepted_steps": state.steps,
        "rejected_steps": state.rejected,
        "lambda": lam,
    }
    if F is None and not report["converged"]:
        results["newton"] = None
        results["flow_newton_distance"] = None
        ctx.check("flow_matches_newton", False, threshold=FLOW_NEWTON_TOL,
                  detail="flow did not reach a steady state")
    elif F is None:
        u_newton, newton_report = newton_solve(params, state.u, tolerances=tol)
        ctx.converged("newton", newton_report)
        gap = state.u.distance(u_newton)
        results["newton"] = newton_report
        results["flow_newton_distance"] = gap
        _gated(ctx, "flow_matches_newton", newton_report["converged"], gap <= FLOW_NEWTON_TOL,
               value=gap, threshold=FLOW_NEWTON_TOL)
    return results


def run_eigen(ctx: RunContext) -> Dict[str, Any]:
    params, grid, tol = ctx.params, ctx.grid, ctx.tol
    if params.regime != Regime.CRITICAL:
        raise ConfigError(f"eigen needs the critical regime p = q, got p={params.p}, q={params.q}")
    gamma = grid.domain.gauge(grid.points)
    alt = ScalarField(grid, (gamma**2 - 1.0) + 0.5 * (gamma**4 - 1.0)).normalized()
    jobs = {
        "default": lambda: eigen_solve(params, grid=grid, tolerances=tol),
        "alternate": lambda: eigen_solve(params, alt, tolerances=tol),
    }
    results_by_start, errors = run_jobs(jobs)
    if errors:
        raise next(iter(errors.values()))
    lam, v, report = results_by_start["default"]
    lam2, v2, report2 = results_by_start["alternate"]
    ctx.converged("eigen", report)
    ctx.converged("eigen_alternate", report2)
    ctx.check("eigen_residual", report["residual"] <= tol.newton, value=report["residual"],
              threshold=tol.newton)
    ctx.check("lambda_two_starts", abs(lam - lam2) <= EIGEN_LAMBDA_TOL, value=abs(lam - lam2),
              threshold=EIGEN_LAMBDA_TOL)
    gap = v.distance(v2)
    ctx.check("eigenfunction_two_starts", gap <= EIGEN_FIELD_TOL, value=gap,
              threshold=EIGEN_FIELD_TOL)
    ctx.write_field(v)
    results: Dict[str, Any] = {
        "lambda": lam,
        "lambda_alternate": lam2,
        "eigen": report,
        "eigen_alternate": report2,
    }
    if is_radial_instance(params, grid.domain):
        profile = radial_eigen(params, grid.domain.radius)
        write_profile(profile, ctx.note_file("profile.csv"))
        rel = abs(lam - profile.lam) / profile.lam
        results["oracle_lambda"] = profile.lam
        ctx.check("lambda_matches_oracle", rel <= EIGEN_ORACLE_TOL, value=rel,
                  threshold=EIGEN_ORACLE_TOL)
    return results


def _continuation_singular(ctx: RunContext) -> Dict[str, Any]:
    params, grid, tol = ctx.params, ctx.grid, ctx.tol
    chain = eps_continuation(params, grid, ctx.config.continuation.eps_values, tolerances=tol)
    ctx.check("converged.eps_chain", chain["all_converged"], detail=f"{len(chain['chain'])} steps")
    ctx.check("eps_monotone", chain["monotone"])
    if chain["chain"]:
        ctx.write_field(chain["chain"][-1][0])
    results: Dict[str, Any] = {
        "eps": list(chain["eps"]),
        "sup_norms": chain["sup_norms"],
        "reports": [r for _, r in chain["chain"]],
    }
    if _centered_disk(grid.domain):
        R = grid.domain.radius
        domains = [Disk(radius=f * R, ndim=params.d) for f in LOWER_BOUND_RADII]
        study = lower_bound_study(
            params, domains, ctx.config.grid.N,
            min_offset=ctx.config.grid_min_offset(), tolerances=tol,
        )
        results["lower_bound"] = study
        ctx.check("converged.lower_bound", study["all_converged"])
        ctx.check("lower_bound", study["bound_holds"], value=study["c"])
        ctx.check("lower_bound_power", study["power_relative_error"] <= LOWER_BOUND_POWER_TOL,
                  value=study["power_relative_error"], threshold=LOWER_BOUND_POWER_TOL)
    return results


def _continuation_critical(ctx: RunContext) -> Dict[str, Any]:
    params, grid, tol = ctx.params, ctx.grid, ctx.tol
    lam, _, report = eigen_solve(params, grid=grid, tolerances=tol)
    ctx.converged("eigen", report)
    results: Dict[str, Any] = {"lambda": lam, "eigen": report}
    if params.p <= 1:
        results["s_chain"] = None
        logger.info("s-continuation skipped: the blow-up value needs p > 1")
        return results
    s_values = s_values_from_eigenvalue(lam, params.p, ctx.config.continuation.s_fractions)
    chain = s_continuation(params, grid, s_values, tolerances=tol)
    ctx.check("converged.s_chain", chain["all_converged"], detail=f"{len(chain['chain'])} steps")
    ctx.check("s_increasing", chain["increasing"])
    estimate = chain["lambda_estimate"]
    rel = None if estimate is None else abs(estimate - lam) / lam
    ctx.check("blowup_matches_lambda", rel is not None and rel <= S_ESTIMATE_TOL, value=rel,
              threshold=S_ESTIMATE_TOL)
    if chain["chain"]:
        ctx.write_field(chain["chain"][-1][0])
    results.update({
        "s": chain["s"],
        "sup_norms": chain["sup_norms"],
        "S": chain["S"],
        "lambda_estimate": estimate,
        "reports": [r for _, r in chain["chain"]],
    })
    return results


def run_continuation(ctx: RunContext) -> Dict[str, Any]:
    if ctx.params.regime == Regime.SINGULAR:
        return _continuation_singular(ctx)
    if ctx.params.regime == Regime.CRITICAL:
        return _continuation_critical(ctx)
    raise ConfigError("continuation runs the eps-chain (singular) or the s-chain (critical)")


def run_holder(ctx: RunContext) -> Dict[str, Any]:
    params, grid = ctx.params, ctx.grid
    settings = ctx.config.holder
    u, report, ladder = _solve_configured(ctx)
    ctx.converged("newton", report)
    ctx.write_field(u)
    probe = (
        ScatterProbe() if settings.probe == "scatter"
        else RayProbe(point=settings.point, direction=settings.direction)
    )
    fit = fit_boundary_exponent(u, probe)
    split = split_window_check(u, probe)
    write_fit_profile(u, ctx.note_file("profile.csv"), probe)
    ctx.check("split_window", split["passed"], value=split["difference"])
    band = settings.band
    min_r2 = 0.0
    if band is None and grid.domain.kind == "cusp":
        band, min_r2 = CUSP_BAND, CUSP_MIN_R2
    if band is not None:
        _gated(ctx, "exponent_band", report["converged"], band_check(fit, band, min_r2),
               value=fit["slope"], detail=f"band [{band[0]}, {band[1]}], R^2 {fit['r2']:.5f}")
    results: Dict[str, Any] = {"solve": report, "fit": fit, "split_window": split}
    if ladder is not None:
        results["eps_ladder"] = ladder
    if params.regime == Regime.SINGULAR:
        results["worst_case_exponent"] = subsolution_exponent(params.n, params.p, params.q)
    return results


def _barriers_cusp(ctx: RunContext) -> Dict[str, Any]:
    params, tol = ctx.params, ctx.tol
    spec, cusp = make_supersolution(params, ctx.config.barriers.target_a)
    grid = build_grid(cusp, ctx.config.grid.N, ctx.config.grid_min_offset())
    spec, cert = calibrate(spec, params, grid)
    write_certificate(cert, ctx.note_file("certificate.csv"))
    ctx.check("certified.supersolution", cert.passed, value=cert.summary()["worst_margin"])
    fd = fd_cross_check(spec, grid)
    ctx.check("closed_form_derivatives", fd["passed"],
              value=max(fd["max_gradient_error"], fd["max_relative_error"]))

    u, report, ladder = _solve_fresh(params, grid, tol)
    ctx.converged("newton", report)
    ctx.write_field(u)
    ok = report["converged"]
    w = ScalarField(grid, spec.value(grid.points))
    cmp = comparison_check(w, u, tol.cmp, roles="w >= u")
    _gated(ctx, "comparison", ok, cmp["passed"], value=cmp["min_gap"], threshold=-tol.cmp)
    lower = cusp_lower_bound_check(u, spec, default_window(grid), tol.cmp)
    _gated(ctx, "dominates_w", ok, lower["dominates_w"], value=lower["min_gap_w"],
           detail=f"{lower['window_nodes']} axis nodes")
    _gated(ctx, "half_constant_bound", ok, lower["half_constant"],
           value=lower["min_gap_half_constant"], detail=f"{lower['window_nodes']} axis nodes")
    fit = fit_boundary_exponent(u, RayProbe())
    _gated(ctx, "axis_exponent_band", ok, band_check(fit, CUSP_BAND, CUSP_MIN_R2),
           value=fit["slope"], detail=f"R^2 {fit['r2']:.5f}")
    return {
        "cusp_grid": grid.describe(),
        "certificate": cert.summary(),
        "fd_check": fd,
        "solve": report,
        "eps_ladder": ladder,
        "comparison": cmp,
        "lower_bound": lower,
        "fit": fit,
    }


def _barriers_smooth(ctx: RunContext) -> Dict[str, Any]:
    params, grid, tol = ctx.params, ctx.grid, ctx.tol
    settings = ctx.config.barriers
    if settings.boundary_point is not None:
        points = np.atleast_2d(np.asarray(settings.boundary_point, dtype=float))
    else:
        points = grid.domain.sample_boundary(settings.boundary_samples)
    spec, cert = calibrate(make_subsolution(params, grid.domain, points[0]), params, grid)
    write_certificate(cert, ctx.note_file("certificate.csv"))
    ctx.check("certified.subsolution", cert.passed, value=cert.summary()["worst_margin"])
    fd = fd_cross_check(spec, grid)
    ctx.check("closed_form_derivatives", fd["passed"],
              value=max(fd["max_gradient_error"], fd["max_relative_error"]))

    u, report, _ladder = _solve_configured(ctx)
    ctx.converged("newton", report)
    ctx.write_field(u)
    upper = upper_bound_check(u, params, grid, points, tol=tol.cmp)
    _gated(ctx, "comparison", report["converged"], upper["comparison_passed"])
    _gated(ctx, "upper_bound", report["converged"], upper["passed"], value=upper["max_excess"],
           threshold=tol.cmp)
    return {"certificate": cert.summary(), "fd_check": fd, "solve": report, "upper_bound": upper}


def run_barriers(ctx: RunContext) -> Dict[str, Any]:
    if ctx.config.domain.kind == "cusp":
        return _barriers_cusp(ctx)
    return _barriers_smooth(ctx)


def _profile_gap(a: RadialProfile, b: RadialProfile) -> float:
    ub, _ = b.evaluate(a.r)
    return float(np.max(np.abs(a.u - ub)))


def run_oracle(ctx: RunContext) -> Dict[str, Any]:
    params, tol = ctx.params, ctx.tol
    settings = ctx.config.oracle
    cap = cap_area_check(params.n, settings.cap_theta, settings.cap_grid)
    ctx.check("cap_area", cap["relative_error"] <= CAP_TOL, value=cap["relative_error"],
              threshold=CAP_TOL)
    results: Dict[str, Any] = {"cap_area": cap}
    if not is_radial_instance(params, ctx.domain) or params.regime == Regime.SUPERCRITICAL:
        logger.info("Radial shooting skipped: needs a radial, non-supercritical instance")
        return results

    R = ctx.domain.radius
    shoot = radial_eigen if params.regime == Regime.CRITICAL else radial_solve
    profile = shoot(params, R)
    loose = shoot(params, R, rtol=LOOSE_RTOL, atol=LOOSE_ATOL)
    write_profile(profile, ctx.note_file("profile.csv"))
    gap = _profile_gap(profile, loose)
    results["profile"] = profile.describe()
    results["integrator_agreement"] = gap
    ctx.check("integrator_agreement", gap <= INTEGRATOR_AGREEMENT_TOL, value=gap,
              threshold=INTEGRATOR_AGREEMENT_TOL)
    ctx.check("profile_convex", profile.describe()["convex"])
    if _is_paraboloid(params, ctx.domain):
        deviation = float(np.max(np.abs(profile.u - 0.5 * (profile.r**2 - R * R))))
        results["paraboloid_deviation"] = deviation
        ctx.check("paraboloid_profile", deviation <= PROFILE_TOL, value=deviation,
                  threshold=PROFILE_TOL)
    if params.regime == Regime.SINGULAR:
        fit = exponent_from_profile(profile)
        results["profile_exponent"] = fit
        if params.q == params.n and params.eps <= PROFILE_EXPONENT_MAX_EPS:
            expected = params.q / (params.q - params.p)
            ctx.check("profile_exponent", abs(fit["slope"] - expected) <= PROFILE_EXPONENT_TOL,
                      value=fit["slope"], threshold=expected)
    return results


def run_selftest(ctx: RunContext) -> Dict[str, Any]:
    """Golden paraboloid, chart round trip, scaling identity and the invariant integral."""
    tol = ctx.tol
    golden = ProblemParams(n=3, p=1.0, q=3.0)
    disk = Disk(radius=1.0)
    grid = build_grid(disk, ctx.config.grid.N)
    u, report = solve(golden, grid, tol)
    ctx.converged("golden", report)
    error = u.distance(paraboloid(grid))
    ctx.check("golden_paraboloid", error <= GOLDEN_TOL, value=error, threshold=GOLDEN_TOL)

    rng = np.random.default_rng(ctx.config.seed)
    pole = rng.normal(size=3)
    chart = ChartMap(n=3, pole=pole)
    x = rng.uniform(-2.0, 2.0, size=(256, 2))
    chart_gap = float(np.max(np.abs(chart.chart_inverse(chart.chart_point(x)) - x)))
    ctx.check("chart_round_trip", chart_gap <= ROUND_TRIP_TOL, value=chart_gap,
              threshold=ROUND_TRIP_TOL)
    support_gap = u.distance(support_to_field(field_to_support(u)))
    ctx.check("support_round_trip", support_gap <= ROUND_TRIP_TOL, value=support_gap,
              threshold=ROUND_TRIP_TOL)

    scaling = scaling_identity_check(ctx.params, seed=ctx.config.seed)
    ctx.check("scaling_identity", scaling["passed"], value=scaling["max_deviation"])
    sweep = uniqueness_sweep(ctx.params.n, seed=ctx.config.seed)
    ctx.check("uniqueness_condition", sweep["passed"])

    invariant = invariant_check(u, golden.n)
    ctx.check("invariant_I0", invariant["relative_error"] <= INVARIANT_TOL,
              value=invariant["relative_error"], threshold=INVARIANT_TOL)
    return {
        "golden": {"grid": grid.describe(), "solve": report, "error_linf": error},
        "chart_round_trip": chart_gap,
        "support_round_trip": support_gap,
        "scaling": scaling,
        "uniqueness_sweep": sweep,
        "invariant": invariant,
    }


PIPELINES: Dict[str, Pipeline] = {
    "solve": run_solve,
    "flow": run_flow,
    "eigen": run_eigen,
    "continuation": run_continuation,
    "holder": run_holder,
    "barriers": run_barriers,
    "oracle": run_oracle,
    "selftest": run_selftest,
}


def get_pipeline(subcommand: str) -> Pipeline:
    if subcommand not in PIPELINES:
        raise ConfigError(f"unknown subcommand '{subcommand}'; expected one of {sorted(PIPELINES)}")
    return PIPELINES[subcommand]
