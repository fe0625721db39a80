"""
Logging utilities for the rearrangement toolkit.
Console logging on stderr, optional rotating files, and loguru routing for the solvers.
"""

import functools
import logging
import logging.handlers
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

from loguru import logger as loguru_logger

# Library modules log under this namespace via logging.getLogger(__name__).
PACKAGE_LOGGER = "src"

CONSOLE_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
FILE_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s"
DATE_FORMAT = "%H:%M:%S"


class ColoredFormatter(logging.Formatter):
    """Console formatter that tints the level name only."""

    LEVEL_COLORS = {
        logging.DEBUG: "\033[2m",
        logging.INFO: "\033[36m",
        logging.WARNING: "\033[33m",
        logging.ERROR: "\033[31m",
        logging.CRITICAL: "\033[1;31m",
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        color = self.LEVEL_COLORS.get(record.levelno)
        if color is None:
            return text
        return text.replace(record.levelname, f"{color}{record.levelname}{self.RESET}", 1)


def parse_size(size: str) -> int:
    """Convert '10MB'-style sizes to bytes."""
    text = size.strip().upper()
    for suffix, factor in (("GB", 1024**3), ("MB", 1024**2), ("KB", 1024), ("B", 1)):
        if text.endswith(suffix):
            return int(text[: -len(suffix)]) * factor
    return int(text)


def _rotating_handler(
    path: Path, level: int, max_bytes: int, backup_count: int
) -> logging.handlers.RotatingFileHandler:
    handler = logging.handlers.RotatingFileHandler(
        path, maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8"
    )
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def setup_logging(
    level: str = "INFO",
    log_dir: Optional[str] = None,
    app_name: str = "rkit",
    max_file_size: str = "10MB",
    backup_count: int = 5,
) -> logging.Logger:
    """
    Configure the package logger and loguru.

    Args:
        level: Console level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_dir: Directory for rotating log files; None logs to stderr only
        app_name: Prefix of the log file names
        max_file_size: Size at which a log file rotates, e.g. "10MB"
        backup_count: Rotated files kept per log

    Returns:
        The configured package logger
    """
    numeric_level = getattr(logging, level.upper())
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(numeric_level)
    logger.handlers.clear()
    logger.propagate = False

    # stdout carries summaries and JSON
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(ColoredFormatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(console_handler)

    loguru_logger.remove()
    loguru_logger.add(
        sys.stderr,
        level=level.upper(),
        format="{time:HH:mm:ss} | {level: <8} | {name} | {message}",
    )

    if log_dir is None:
        return logger

    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)
    max_bytes = parse_size(max_file_size)

    logger.addHandler(
        _rotating_handler(log_path / f"{app_name}.log", logging.DEBUG, max_bytes, backup_count)
    )
    checks_handler = _rotating_handler(
        log_path / f"{app_name}_checks.log", logging.INFO, max_bytes, backup_count
    )
    checks_handler.addFilter(CheckLogFilter())
    logger.addHandler(checks_handler)
    logger.addHandler(
        _rotating_handler(
            log_path / f"{app_name}_errors.log", logging.ERROR, max_bytes, backup_count
        )
    )

    loguru_logger.add(
        log_path / f"{app_name}_solver.log",
        level="DEBUG",
        rotation=max_bytes,
        retention=backup_count,
        encoding="utf-8",
    )
    return logger


class CheckLogFilter(logging.Filter):
    """Passes only records that carry a check verdict or margin."""

    CHECK_KEYWORDS = ("check", "pass", "fail", "inconclusive", "skipped", "margin", "verdict")

    def filter(self, record: logging.LogRecord) -> bool:
        message = record.getMessage().lower()
        return any(keyword in message for keyword in self.CHECK_KEYWORDS)


class PerformanceLogger:
    """Wall-clock timers for check jobs, keyed by job name."""

    def __init__(self, logger: logging.Logger):
        self.logger = logger
        self.started: Dict[str, float] = {}

    def start_timer(self, name: str) -> None:
        self.started[name] = time.perf_counter()

    def end_timer(self, name: str, message: Optional[str] = None) -> Optional[float]:
        """
        Stop a timer.

        Returns:
            Elapsed seconds, or None if the timer was never started
        """
        start = self.started.pop(name, None)
        if start is None:
            self.logger.warning(f"No running timer named '{name}'")
            return None

        elapsed = time.perf_counter() - start
        self.logger.debug(f"{message or name} took {elapsed:.3f}s")
        return elapsed


class StructuredLogger:
    """Logger with structured data support."""

    def __init__(self, logger: logging.Logger):
        self.logger = logger

    def log_check_report(self, report: Dict[str, Any]):
        """Log one check verdict."""
        self.logger.info(
            f"CHECK | {report.get('check_id')} | {report.get('status')} | "
            f"margin: {report.get('margin', 0.0):.3e} | "
            f"tolerance: {report.get('tolerance', 0.0):.3e}"
        )

    def log_minimize_result(self, result: Dict[str, Any]):
        """Log a minimization outcome."""
        energy = result.get("energy", {})
        self.logger.info(
            f"MINIMIZE | masses: {result.get('masses')} | "
            f"E: {energy.get('total', 0.0):.12g} | "
            f"iterations: {result.get('iterations')} | "
            f"evaluations: {result.get('energy_evaluations')} | "
            f"diagnosis: {result.get('diagnosis')}"
        )

    def log_suite_summary(self, counts: Dict[str, int]):
        """Log the verdict counts of a suite run."""
        summary = " | ".join(f"{status}: {count}" for status, count in sorted(counts.items()))
        self.logger.info(f"SUITE | {summary}")


@functools.lru_cache(maxsize=None)
def get_performance_logger() -> PerformanceLogger:
    """Shared timer instance logging under src.performance."""
    return PerformanceLogger(logging.getLogger(f"{PACKAGE_LOGGER}.performance"))
