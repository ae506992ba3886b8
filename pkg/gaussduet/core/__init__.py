from gaussduet.types import ConfigError, StabilityError
from functools import wraps
import logging
import os
import numpy as np

logger = logging.getLogger(__name__)

THREADS_ENV = "GAUSSDUET_THREADS"

DEFAULTS = {
    "fd_step": 1e-4,
    "grid_points": 201,
    "physicality_tolerance": 1e-12,
    "population_floor": 1e-14,
}


def threads_from_environment():
    """
    Reads the worker cap from the GAUSSDUET_THREADS environment variable, falling back to the number of CPUs
    (at most 8) when it is not set.
    :return: A positive integer
    """
    value = os.environ.get(THREADS_ENV)
    if value is None or value.strip() == "":
        return min(8, os.cpu_count() or 1)
    return check_threads(value)


def check_threads(value):
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, received {value!r}") from None
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, received {value!r}")
    return threads


def _initial_settings():
    result = dict(DEFAULTS)
    result["threads"] = threads_from_environment()
    return result


# Module level settings shared by every gaussduet module
__settings = None


def settings():
    global __settings
    if __settings is None:
        __settings = _initial_settings()
    return __settings


def update_settings(values):
    current = dict(settings())
    for key, value in values.items():
        if key not in current:
            raise ConfigError(f"Unknown setting '{key}'")
        if key == "threads":
            value = check_threads(value)
        elif key == "grid_points":
            value = int(value)
            if value < 3:
                raise ConfigError("grid_points must be at least 3")
        elif float(value) <= 0:
            raise ConfigError(f"Setting '{key}' must be positive, received {value!r}")
        current[key] = value
    global __settings
    __settings = current
    logger.debug("Settings updated: %s", values)


def reset_settings():
    global __settings
    __settings = _initial_settings()


def setting(key, value=None):
    """
    Returns *value* when it is provided, otherwise the module level setting for *key*.
    """
    return settings()[key] if value is None else value


def attach_exception_handler(func):
    """
    When used as a decorator, it will catch numpy linear algebra failures and wrap them with the gaussduet
    StabilityError. A singular Lyapunov system or a failed eigen-decomposition is a property of the drift.
    :param func: The function being decorated
    :return: Decorated function
    """
    @wraps(func)
    def exception_handler(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except np.linalg.LinAlgError as e:
            raise StabilityError.wrap(e, f"{func.__name__} failed: {e}") from None
    return exception_handler


def copy_non_null_keys(param_list):
    result = {}
    for key, val in param_list.items():
        if val is not None:
            result[key] = val
    return result
