from functools import wraps
from typing import Optional

from .core import ExperimentLogger, experiment_log_function, _default_logger


def log_experiment(logger: Optional[ExperimentLogger] = None):
    """Log everything: arguments, result, duration and exceptions"""
    return experiment_log_function(logger)


def log_result(logger: Optional[ExperimentLogger] = None):
    """Log only the result of a successful call"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            result = func(*args, **kwargs)
            (logger or _default_logger).log_result(func, result)
            return result
        return wrapper
    return decorator
