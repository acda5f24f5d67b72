"""Core module: configuration, logging, errors, concurrent runs and the CLI runner."""
from .config import (
    DEFAULT_GRID_N,
    DEFAULT_TOL_NEWTON,
    REPORT_SCHEMA_VERSION,
    get_data_dir,
    get_log_level,
    get_tolerances,
)
from .error import (
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ErrorType,
    GridError,
    LabError,
    PropertyError,
    classify_error,
    exit_code_for,
    handle_error,
    log_error,
)
from .logger import get_logger, setup_logger

__all__ = [
    # Config
    "DEFAULT_GRID_N",
    "DEFAULT_TOL_NEWTON",
    "REPORT_SCHEMA_VERSION",
    "get_data_dir",
    "get_log_level",
    "get_tolerances",
    # Error
    "CalibrationError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "ErrorType",
    "GridError",
    "LabError",
    "PropertyError",
    "classify_error",
    "exit_code_for",
    "handle_error",
    "log_error",
    # Logger
    "get_logger",
    "setup_logger",
]
