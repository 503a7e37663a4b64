"""
Logging Configuration and Setup
Provides timed, logged operations for certification and integration runs
"""

import functools
import logging
import time
from typing import Optional

from config.settings import LOGGING_CONFIG

logger = logging.getLogger(__name__)

_configured = False


def configure_logging(level: Optional[str] = None) -> None:
    """Apply LOGGING_CONFIG once: stream handler plus an optional file handler"""
    global _configured
    root = logging.getLogger()
    root.setLevel((level or LOGGING_CONFIG["level"]).upper())
    if _configured:
        return

    formatter = logging.Formatter(LOGGING_CONFIG["format"])
    stream = logging.StreamHandler()
    stream.setFormatter(formatter)
    root.addHandler(stream)

    if LOGGING_CONFIG["file_path"]:
        try:
            file_handler = logging.FileHandler(LOGGING_CONFIG["file_path"])
            file_handler.setFormatter(formatter)
            root.addHandler(file_handler)
        except OSError as e:
            logger.error(f"Failed to open log file {LOGGING_CONFIG['file_path']}: {e}")
    _configured = True


def observe_operation(name: Optional[str] = None):
    """Decorator to log start, elapsed time and failures of an operation"""

    def decorator(func):
        operation = name or func.__name__
        op_logger = logging.getLogger(func.__module__)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            if not op_logger.isEnabledFor(logging.DEBUG):
                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    op_logger.error(f"{operation} failed: {e}")
                    raise
            start = time.perf_counter()
            op_logger.debug(f"{operation} started")
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                op_logger.error(f"{operation} failed after {time.perf_counter() - start:.3f}s: {e}")
                raise
            op_logger.debug(f"{operation} finished in {time.perf_counter() - start:.3f}s")
            return result

        return wrapper

    return decorator
