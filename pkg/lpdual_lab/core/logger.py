"""
Logging for runs: one package logger, console output that coexists with tqdm
progress bars, and an optional per-run log file.
"""
import logging
from pathlib import Path
from typing import Optional

from tqdm import tqdm

PACKAGE_LOGGER = "lpdual_lab"
CONSOLE_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class TqdmConsoleHandler(logging.StreamHandler):
    """Writes through tqdm.write so records do not break an active progress bar."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            tqdm.write(self.format(record))
            self.flush()
        except Exception:
            self.handleError(record)


def setup_logger(
    name: str = PACKAGE_LOGGER,
    level: str = "INFO",
    log_file: Optional[Path] = None,
    format_string: Optional[str] = None,
) -> logging.Logger:
    """
    Configure the package logger for one run.

    Module loggers are children of it (``get_logger(__name__)``), so solver,
    flow and calibration messages all reach the same handlers. Calling it
    again closes and replaces the handlers, so consecutive runs in one process
    do not write into each other's log files.

    Args:
        name: Logger name
        level: DEBUG, INFO, WARNING or ERROR; unknown names fall back to INFO
        log_file: Run log, usually ``<out>/lpdual.log``; the file gets every record
            at ``level`` in the plain file format
        format_string: Console format override

    Returns:
        The configured logger
    """
    logger = logging.getLogger(name)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    log_level = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(log_level)
    logger.propagate = False

    console = TqdmConsoleHandler()
    console.setLevel(log_level)
    console.setFormatter(logging.Formatter(format_string or CONSOLE_FORMAT))
    logger.addHandler(console)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(log_level)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str = PACKAGE_LOGGER) -> logging.Logger:
    return logging.getLogger(name)
