import logging
import sys
from typing import Optional, Union

from .core import DEFAULT_FORMAT, level_from_env
from .filters import LargeNumberFilter

Level = Union[int, str]


def _resolve_level(level: Optional[Level]) -> int:
    if level is None:
        return level_from_env()
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"unknown log level {level!r}")
        return resolved
    return level


def configure_logging(level: Optional[Level] = None,
                      format_string: str = None,
                      filename: str = None,
                      enable_number_filter: bool = True):
    """
    Configure the pyborel logger; level defaults to PYBOREL_LOG_LEVEL, then WARNING
    """
    logger = logging.getLogger("pyborel")
    logger.setLevel(_resolve_level(level))

    # Remove existing handlers
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    formatter = logging.Formatter(format_string or DEFAULT_FORMAT)

    if filename:
        handler = logging.FileHandler(filename)
    else:
        handler = logging.StreamHandler(sys.stderr)

    handler.setFormatter(formatter)

    if enable_number_filter:
        handler.addFilter(LargeNumberFilter())

    logger.addHandler(handler)
    return logger


def set_log_level(level: Level):
    """Set log level for pyborel"""
    logging.getLogger("pyborel").setLevel(_resolve_level(level))
