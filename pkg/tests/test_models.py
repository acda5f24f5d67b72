"""Regime table, parameter validation and report builders."""
import pytest
from pydantic import ValidationError

from lpdual_lab.core.error import ConfigError
from lpdual_lab.models.params import (
    ContinuationSettings,
    FlowSettings,
    ProblemParams,
    RunConfig,
)
from lpdual_lab.models.regime import (
    Regime,
    capabilities,
    classify_regime,
    supports,
    validate_regime,
)
from lpdual_lab.models.schema import build_property, build_run_report, build_solve_report


@pytest.mark.parametrize(
    "n, p, q, expected",
    [
        (3, -2.0, 3.0, Regime.SINGULAR),
        (3, 0.5, 4.0, Regime.SINGULAR),
        (3, 2.0, 2.0, Regime.CRITICAL),
        (3, 1.0, 1.0, Regime.CRITICAL),
        (3, 1.5, 2.5, Regime.SUBCRITICAL),
        (3, 1.0, 3.0, Regime.SUBCRITICAL),
        (3, 4.0, 3.0, Regime.SUPERCRITICAL),
        (3, 0.5, 2.0, None),
        (3, 2.0, 1.5, None),
    ],
)
def test_classify_regime(n, p, q, expected):
    assert classify_regime(n, p, q) == expected


def test_validate_regime_rejects_inconsistent_tag():
    with pytest.raises(ConfigError) as info:
        validate_regime(3, 2.0, 2.0, Regime.SUBCRITICAL)
    assert "critical" in str(info.value)
    assert info.value.details["tag"] == "subcritical"


def test_validate_regime_lists_table_for_uncovered_exponents():
    with pytest.raises(ConfigError) as info:
        validate_regime(3, 0.5, 2.0)
    assert "Subcritical: q > p >= 1" in str(info.value)


def test_capabilities():
    assert supports(Regime.CRITICAL, "eigen")
    assert not supports(Regime.SUBCRITICAL, "barriers")
    assert capabilities(Regime.SUPERCRITICAL) == ["solve"]


def test_problem_params_resolve_regime():
    params = ProblemParams(n=3, p=-2.0, q=3.0, eps=1e-3)
    assert params.regime == Regime.SINGULAR
    assert params.d == 2
    assert params.with_eps(1e-4).eps == 1e-4
    assert params.with_eps(1e-4).regime == Regime.SINGULAR


def test_problem_params_need_eps_below_one():
    with pytest.raises(ValidationError):
        ProblemParams(n=3, p=0.5, q=3.0, eps=0.0)


def test_problem_params_reject_wrong_tag():
    with pytest.raises(ValidationError):
        ProblemParams(n=3, p=2.0, q=2.0, regime="subcritical")


def test_constant_density_evaluates():
    params = ProblemParams(n=3, p=1.0, q=3.0, density={"c": 2.5})
    values = params.g([[0.0, 0.0], [0.3, -0.2]])
    assert values.tolist() == [2.5, 2.5]


def test_density_rejects_non_positive_constant():
    with pytest.raises(ValidationError):
        ProblemParams(density={"c": 0.0})


def test_continuation_sequences_validated():
    with pytest.raises(ValidationError):
        ContinuationSettings(eps_values=(1e-2, 1e-1))
    with pytest.raises(ValidationError):
        ContinuationSettings(s_fractions=(0.5, 0.5))
    assert ContinuationSettings(eps_values=(0.1, 0.01)).eps_values == (0.1, 0.01)


def test_flows_default_to_exact_offsets_and_the_linearized_scheme():
    assert RunConfig(subcommand="flow").grid_min_offset() == 0.0
    assert RunConfig(subcommand="flow").flow.scheme == "linearized"
    assert RunConfig(subcommand="solve").grid_min_offset() == 0.0
    assert RunConfig(subcommand="flow", grid={"min_offset": 0.25}).grid_min_offset() == 0.25
    with pytest.raises(ValidationError):
        FlowSettings(scheme="implicit")


def test_run_report_passed_flag():
    ok = build_property("a", True, value=1, threshold=2)
    bad = build_property("b", False)
    assert ok["value"] == 1.0 and isinstance(ok["value"], float)
    report = build_run_report(
        schema_version="1.0", subcommand="solve", config={}, grid={}, results={},
        properties=[ok], exit_code=0,
    )
    assert report["passed"]
    report = build_run_report(
        schema_version="1.0", subcommand="solve", config={}, grid={}, results={},
        properties=[ok, bad], exit_code=1,
    )
    assert not report["passed"]
    report = build_run_report(
        schema_version="1.0", subcommand="solve", config={}, grid={}, results={},
        properties=[ok], exit_code=3, error={"error_type": "invalid_config"},
    )
    assert not report["passed"]


def test_solve_report_casts_types():
    report = build_solve_report(
        converged=1, status="converged", residual=1, iterations=3.0, convexity_violations=0
    )
    assert report["converged"] is True
    assert isinstance(report["residual"], float)
    assert report["functionals"] == {}
