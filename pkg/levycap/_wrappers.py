"""
Function decorators for internal use.
"""

from typing import Any, Callable, Union, List, Sequence
import inspect
from functools import wraps

import numpy as np

from levycap.errors import ConfigurationError

Vector = Union[np.ndarray, Sequence[float], float]
"""Anything that can be read as a point of R^d (a bare number means d = 1)."""


def as_vector(value: Vector) -> np.ndarray:
    """
    Returns value as a 1-d float array (scalars become length one arrays)
    """
    return np.atleast_1d(np.asarray(value, dtype=float)).reshape(-1)


def cast_arrays(func: Callable) -> Callable:
    """
    Coerces arguments based on type hints: `Vector` arguments become 1-d
    float arrays, `float` arguments become python floats and `int`
    arguments are rounded.
    """

    argspec = inspect.getfullargspec(func)

    @wraps(func)
    def casted_func(*args, **kwargs):
        kwargs |= dict(zip(argspec.args, args))
        for kwarg, value in kwargs.items():
            kwarg_type = func.__annotations__.get(kwarg)
            if value is None:
                continue
            if kwarg_type is Vector:
                kwargs[kwarg] = as_vector(value)
            elif kwarg_type is float:
                kwargs[kwarg] = float(value)
            elif kwarg_type is int:
                kwargs[kwarg] = round(value)
            elif kwarg_type == List[float]:
                kwargs[kwarg] = [float(i) for i in value]
        return func(**kwargs)

    return casted_func


def integer(value: Any) -> int:
    "int(value) for integral numbers only (2.0 is fine, 2.5 is not)"
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"{value!r} is not an integer")
    return int(number)


def read_field(convert: Callable, value: Any, field: str) -> Any:
    """
    Returns convert(value); type and value errors become configuration
    errors naming the field.
    """
    try:
        return convert(value)
    except (TypeError, ValueError) as error:
        raise ConfigurationError(f"cannot read {value!r} ({error})", field) from error
