"""Error classification, environment configuration, logging and concurrent jobs."""
import logging

import pytest

from lpdual_lab.core.config import DEFAULT_TOL_NEWTON, get_data_dir, get_log_level, get_tolerances
from lpdual_lab.core.error import (
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ErrorType,
    classify_error,
    exit_code_for,
    handle_error,
)
from lpdual_lab.core.logger import get_logger, setup_logger
from lpdual_lab.core.parallel import run_jobs, run_jobs_parallel_with_errors


@pytest.mark.parametrize(
    "error, error_type, code",
    [
        (ConfigError("bad"), ErrorType.INVALID_CONFIG, 3),
        (ConvergenceError("stuck"), ErrorType.NON_CONVERGENCE, 2),
        (CalibrationError("no C"), ErrorType.CALIBRATION_FAILURE, 1),
        (DomainError("eps - u <= 0"), ErrorType.DOMAIN_ERROR, 1),
        (RuntimeError("something else"), ErrorType.UNKNOWN, 1),
        (ValueError("invalid parameter"), ErrorType.INVALID_CONFIG, 3),
        (ZeroDivisionError("x"), ErrorType.DOMAIN_ERROR, 1),
    ],
)
def test_classify_and_exit_code(error, error_type, code):
    assert classify_error(error) == error_type
    assert exit_code_for(classify_error(error)) == code


def test_lab_error_to_dict():
    error = ConfigError("bad grid", details={"N": 3})
    assert error.to_dict() == {
        "error_type": "invalid_config",
        "message": "bad grid",
        "details": {"N": 3},
    }


def test_handle_error_returns_exit_code():
    info = handle_error(ConvergenceError("no bracket", details={"m": 1.0}))
    assert info["exit_code"] == 2
    assert info["error_class"] == "ConvergenceError"
    assert info["details"] == {"m": 1.0}


def test_handle_error_reraises():
    with pytest.raises(ConfigError):
        handle_error(ConfigError("x"), raise_again=True)


def test_tolerance_environment_overrides(monkeypatch):
    monkeypatch.setenv("LPDUAL_TOL_NEWTON", "1e-7")
    monkeypatch.setenv("LPDUAL_TOL_CMP", "not-a-number")
    monkeypatch.setenv("LPDUAL_TOL_EIGEN", "-1")
    tol = get_tolerances()
    assert tol["newton"] == 1e-7
    assert tol["cmp"] == 1e-10
    assert tol["eigen"] == 1e-8


def test_tolerance_defaults(monkeypatch):
    monkeypatch.delenv("LPDUAL_TOL_NEWTON", raising=False)
    assert get_tolerances()["newton"] == DEFAULT_TOL_NEWTON


def test_data_dir_and_log_level(monkeypatch, tmp_path):
    monkeypatch.setenv("LPDUAL_DATA_DIR", str(tmp_path))
    monkeypatch.setenv("LPDUAL_LOG_LEVEL", "debug")
    assert get_data_dir() == tmp_path
    assert get_log_level() == "DEBUG"


def test_setup_logger_writes_file(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    logger = setup_logger("lpdual_lab.test_logger", level="INFO", log_file=log_file)
    logger.info("hello from the solver")
    for handler in logger.handlers:
        handler.flush()
    assert "hello from the solver" in log_file.read_text(encoding="utf-8")
    assert len(logger.handlers) == 2
    setup_logger("lpdual_lab.test_logger", level="WARNING")
    assert len(logger.handlers) == 1
    assert logger.level == logging.WARNING


def test_module_loggers_propagate_to_package_logger():
    package = setup_logger(level="INFO")
    logger = get_logger("lpdual_lab.solvers.newton")
    chain = []
    while logger is not None:
        chain.append(logger)
        logger = logger.parent
    assert package in chain


async def test_parallel_jobs_collect_results_and_errors():
    def fail():
        raise ConvergenceError("diverged")

    results, errors = await run_jobs_parallel_with_errors(
        {"b": lambda: 2, "a": lambda: 1, "broken": fail}
    )
    assert list(results) == ["b", "a"]
    assert results == {"b": 2, "a": 1}
    assert isinstance(errors["broken"], ConvergenceError)


def test_run_jobs_sync_entry_point():
    results, errors = run_jobs({f"job{i}": (lambda i=i: i * i) for i in range(5)})
    assert errors == {}
    assert [results[f"job{i}"] for i in range(5)] == [0, 1, 4, 9, 16]


def test_run_jobs_empty():
    assert run_jobs({}) == ({}, {})
