import json
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
import numpy as np
from gaussduet import core


class JSONEncoder(json.JSONEncoder):

    def default(self, obj):
        if isinstance(obj, complex):
            return {"re": obj.real, "im": obj.imag}
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, np.generic):
            return obj.item()
        elif isinstance(obj, Enum):
            return obj.value
        elif isinstance(obj, set):
            return sorted(obj)
        elif hasattr(obj, "to_dict"):
            return obj.to_dict()
        return json.JSONEncoder.default(self, obj)


def json_safe(value):
    """
    Replaces non-finite floats with None throughout a structure so the encoder never writes NaN or Infinity.
    """
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    elif isinstance(value, np.floating):
        return json_safe(float(value))
    elif isinstance(value, complex):
        return {"re": json_safe(value.real), "im": json_safe(value.imag)}
    elif isinstance(value, dict):
        return {key: json_safe(val) for key, val in value.items()}
    elif isinstance(value, (list, tuple)):
        return [json_safe(val) for val in value]
    elif hasattr(value, "to_dict"):
        return json_safe(value.to_dict())
    return value


def json_dumps(value, **kwargs):
    return json.dumps(json_safe(value), cls=JSONEncoder, allow_nan=False, **kwargs)


def format_float(value):
    """
    Formats a number for tabular output as the shortest decimal that round-trips. Undefined or non-finite
    values are written as an empty cell.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    value = float(value)
    if not math.isfinite(value):
        return ""
    return repr(value)


def parallel_map(fnc, items, workers=None):
    """
    Applies a function to each item with a bounded thread pool and returns the results in input order.
    :param fnc: The function to apply
    :param items: An iterable of arguments
    :param workers: Maximum worker count, defaults to the *threads* setting
    :return: A list of results
    """
    items = list(items)
    workers = min(core.setting("threads", workers), max(len(items), 1))
    if workers <= 1:
        return [fnc(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fnc, items))


def format_complex(value):
    """Formats a complex number as ``re+imj`` using :func:`format_float` for both parts"""
    if value is None:
        return ""
    value = complex(value)
    imag = format_float(value.imag)
    if imag and not imag.startswith("-"):
        imag = "+" + imag
    return f"{format_float(value.real)}{imag}j"
