"""
Error classes of the lab and their mapping to CLI exit statuses.
"""
import logging
import traceback
from enum import Enum
from typing import Any, Dict, Optional


class ErrorType(Enum):
    """Error classification types."""
    INVALID_CONFIG = "invalid_config"
    DOMAIN_ERROR = "domain_error"
    GRID_ERROR = "grid_error"
    NON_CONVERGENCE = "non_convergence"
    PROPERTY_FAILURE = "property_failure"
    CALIBRATION_FAILURE = "calibration_failure"
    UNKNOWN = "unknown"


# Process exit status per error class
EXIT_CODES: Dict[ErrorType, int] = {
    ErrorType.INVALID_CONFIG: 3,
    ErrorType.NON_CONVERGENCE: 2,
    ErrorType.PROPERTY_FAILURE: 1,
    ErrorType.CALIBRATION_FAILURE: 1,
}


class LabError(Exception):
    """Base exception for lpdual_lab errors."""

    error_type_default = ErrorType.UNKNOWN

    def __init__(
        self,
        message: str,
        error_type: Optional[ErrorType] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.error_type = error_type or self.error_type_default
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary."""
        return {
            "error_type": self.error_type.value,
            "message": str(self),
            "details": self.details,
        }


class ConfigError(LabError):
    """Invalid run configuration or parameter set (regime table, tolerances, catalogs)."""
    error_type_default = ErrorType.INVALID_CONFIG


class DomainError(LabError):
    """Evaluation outside the mathematical domain (eps - u <= 0, rho^2 = 0, p = 0, ...)."""
    error_type_default = ErrorType.DOMAIN_ERROR


class GridError(LabError):
    error_type_default = ErrorType.GRID_ERROR


class ConvergenceError(LabError):
    error_type_default = ErrorType.NON_CONVERGENCE


class PropertyError(LabError):
    error_type_default = ErrorType.PROPERTY_FAILURE


class CalibrationError(LabError):
    error_type_default = ErrorType.CALIBRATION_FAILURE


def classify_error(error: Exception) -> ErrorType:
    """
    Classify error type from exception.

    Args:
        error: Exception instance

    Returns:
        ErrorType enum value
    """
    if isinstance(error, LabError):
        return error.error_type

    error_str = str(error).lower()
    error_name = type(error).__name__.lower()

    if "validation" in error_name or any(
        keyword in error_str for keyword in ["invalid", "validation", "parameter", "config"]
    ):
        return ErrorType.INVALID_CONFIG

    if any(keyword in error_name for keyword in ["floatingpoint", "zerodivision", "overflow"]):
        return ErrorType.DOMAIN_ERROR

    if any(keyword in error_str for keyword in ["singular", "converge", "diverge"]):
        return ErrorType.NON_CONVERGENCE

    return ErrorType.UNKNOWN


def exit_code_for(error_type: ErrorType) -> int:
    """Map an error class to the CLI exit status."""
    return EXIT_CODES.get(error_type, 1)


def log_error(
    error: Exception,
    logger: Optional[logging.Logger] = None,
    context: Optional[Dict[str, Any]] = None,
    level: str = "ERROR",
) -> Dict[str, Any]:
    """
    Log error with context and return error info.

    Args:
        error: Exception instance
        logger: Logger instance (if None, uses the package logger)
        context: Additional context information
        level: Logging level

    Returns:
        Dictionary with error information
    """
    if logger is None:
        logger = logging.getLogger("lpdual_lab")

    error_type = classify_error(error)
    error_info = {
        "error_type": error_type.value,
        "error_class": type(error).__name__,
        "message": str(error),
        "context": context or {},
    }
    if isinstance(error, LabError) and error.details:
        error_info["details"] = error.details

    log_method = getattr(logger, level.lower(), logger.error)
    log_method(
        f"[{error_type.value}] {type(error).__name__}: {error}",
        extra={"error_info": error_info, "context": context},
    )

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"Traceback:\n{traceback.format_exc()}")

    return error_info


def handle_error(
    error: Exception,
    logger: Optional[logging.Logger] = None,
    context: Optional[Dict[str, Any]] = None,
    raise_again: bool = False,
) -> Dict[str, Any]:
    """
    Handle error: classify, log, and optionally re-raise.

    Args:
        error: Exception instance
        logger: Logger instance
        context: Additional context
        raise_again: Whether to re-raise the exception

    Returns:
        Error information dictionary, including the CLI exit status

    Raises:
        The original exception if raise_again is True
    """
    error_info = log_error(error, logger, context)
    error_info["exit_code"] = exit_code_for(classify_error(error))

    if raise_again:
        raise error

    return error_info
