import inspect
import json
import logging
import os
import sys
import time
from datetime import datetime
from enum import Enum
from fractions import Fraction
from functools import wraps
from typing import Any, Callable, Dict, Optional

from mpmath import mp, mpf

from .filters import LargeNumberAbbreviator, LargeNumberFilter

LOG_LEVEL_ENV = "PYBOREL_LOG_LEVEL"
DEFAULT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def level_from_env(default: int = logging.WARNING) -> int:
    """Log level named by PYBOREL_LOG_LEVEL, or default when unset or unknown"""
    raw = os.environ.get(LOG_LEVEL_ENV, "").strip()
    if not raw:
        return default
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw.upper())
    return level if isinstance(level, int) else default


class ExperimentLogger:
    """
    Structured logger for experiment calls: one JSON record per call
    """

    def __init__(self, logger_name: str = "pyborel"):
        self.logger = logging.getLogger(logger_name)
        self.abbreviator = LargeNumberAbbreviator()

        if not any(isinstance(f, LargeNumberFilter) for f in self.logger.filters):
            self.logger.addFilter(LargeNumberFilter())

        self._setup_default_logging()

    def _setup_default_logging(self):
        """Install a stderr handler if none exists; stdout belongs to the CLI"""
        if not self.logger.handlers:
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(logging.Formatter(DEFAULT_FORMAT))
            self.logger.addHandler(handler)
            self.logger.setLevel(level_from_env())

    def log_experiment_call(self, func: Callable, args: tuple, kwargs: dict,
                            result: Any = None, exception: Optional[BaseException] = None,
                            duration_ms: Optional[float] = None):
        """Log one experiment call with bounded, abbreviated serialisation"""
        if exception is None and not self.logger.isEnabledFor(logging.INFO):
            return

        record = {
            "timestamp": datetime.now().isoformat(),
            "function": f"{func.__module__}.{func.__name__}",
            "args": self._serialize_args(args, kwargs, func),
            "result": self._safe_serialize(result),
            "exception": f"{type(exception).__name__}: {exception}" if exception else None,
            "duration_ms": round(duration_ms, 3) if duration_ms is not None else None,
        }

        if exception:
            self.logger.error(f"Experiment failed: {json.dumps(record, default=str)}")
        else:
            self.logger.info(f"Experiment finished: {json.dumps(record, default=str)}")

    def log_result(self, func: Callable, result: Any):
        if self.logger.isEnabledFor(logging.INFO):
            self.logger.info(
                f"Experiment {func.__module__}.{func.__name__} returned: "
                f"{json.dumps(self._safe_serialize(result), default=str)}"
            )

    def _serialize_args(self, args: tuple, kwargs: dict, func: Callable) -> Dict[str, Any]:
        try:
            sig = inspect.signature(func)
            bound_args = sig.bind(*args, **kwargs)
            bound_args.apply_defaults()
            return {name: self._safe_serialize(value) for name, value in bound_args.arguments.items()}
        except Exception as e:
            return {"_error": f"Failed to serialize args: {e}"}

    def _safe_serialize(self, value: Any, depth: int = 0) -> Any:
        """JSON-friendly rendering, bounded in depth and length"""
        if value is None or isinstance(value, bool):
            return value
        if isinstance(value, int):
            return self.abbreviator.abbreviate_value(value)
        if isinstance(value, float):
            return value
        if isinstance(value, str):
            return self.abbreviator.abbreviate_text(value[:200])
        if isinstance(value, Fraction):
            return self.abbreviator.abbreviate_text(str(value))
        if isinstance(value, mpf):
            return mp.nstr(value, 20)
        if isinstance(value, Enum):
            return value.value
        if depth >= 3:
            return f"<{type(value).__name__}>"
        if hasattr(value, "to_dict"):
            return self._safe_serialize(value.to_dict(), depth + 1)
        if isinstance(value, (list, tuple)):
            items = [self._safe_serialize(item, depth + 1) for item in value[:5]]
            if len(value) > 5:
                items.append(f"<{len(value) - 5} more>")
            return items
        if isinstance(value, dict):
            return {str(k): self._safe_serialize(v, depth + 1) for k, v in list(value.items())[:8]}
        return self.abbreviator.abbreviate_text(f"<{type(value).__name__}: {str(value)[:100]}>")


# Global logger instance
_default_logger = ExperimentLogger()


def experiment_log_function(logger: Optional[ExperimentLogger] = None):
    """Decorator logging arguments, result, duration and exceptions of an experiment"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            local_logger = logger or _default_logger
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                local_logger.log_experiment_call(
                    func, args, kwargs, exception=e,
                    duration_ms=(time.perf_counter() - start) * 1000,
                )
                raise
            local_logger.log_experiment_call(
                func, args, kwargs, result=result,
                duration_ms=(time.perf_counter() - start) * 1000,
            )
            return result

        return wrapper
    return decorator
