from typing import List

import numpy as np

from levycap import _wrappers
from levycap._wrappers import Vector


def test_cast_arrays_turns_vector_hints_into_flat_float_arrays():
    @_wrappers.cast_arrays
    def some_function(a: Vector):
        return a
    actual = some_function(3)
    assert isinstance(actual, np.ndarray)
    assert actual.shape == (1,)
    assert some_function([[1, 2], [3, 4]]).shape == (4,)


def test_cast_arrays_converts_floats_and_ints_based_on_type_hints():
    @_wrappers.cast_arrays
    def some_function(a: float, b: int):
        return a, b
    a, b = some_function(np.float32(1.5), 2.7)
    assert type(a) is float
    assert b == 3 and isinstance(b, int)


def test_cast_arrays_leaves_unhinted_things_and_none_alone():
    @_wrappers.cast_arrays
    def some_function(a, b: Vector = None):
        return a, b
    actual, also_actual = some_function("cool")
    assert actual == "cool"
    assert also_actual is None


def test_cast_arrays_converts_lists_of_floats():
    @_wrappers.cast_arrays
    def some_function(a: List[float]):
        return a
    assert some_function((1, 2)) == [1.0, 2.0]


def test_cast_arrays_accepts_keyword_arguments():
    @_wrappers.cast_arrays
    def some_function(a: Vector, b: float):
        return a, b
    a, b = some_function(b=1, a=2)
    assert a.tolist() == [2.0]
    assert b == 1.0
