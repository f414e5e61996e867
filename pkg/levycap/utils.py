"""
General handy functions shared by the numerical modules
"""

from typing import Tuple

import numpy as np
from scipy.special import gamma as gamma_function


def positive_part(values: np.ndarray) -> np.ndarray:
    """
    Returns (h)_+ = max{h, 0}, elementwise
    """
    return np.maximum(values, 0.0)


def negative_part(values: np.ndarray) -> np.ndarray:
    """
    Returns (h)_- = max{-h, 0}, elementwise
    """
    return np.maximum(-values, 0.0)


def sphere_area(d: int) -> float:
    """
    Returns the surface area s_{d-1} = 2 pi^{d/2} / Gamma(d/2) of the unit
    sphere in R^d. For d = 1 this is 2, the two "directions" of the line.
    """
    return 2.0 * np.pi ** (d / 2.0) / gamma_function(d / 2.0)


def dyadic_ring(m: int) -> Tuple[float, float]:
    """
    Returns the bounds [2^m, 2^(m+1)] of the m-th dyadic ring
    """
    return (2.0**m, 2.0 ** (m + 1))


def relative_gap(a: float, b: float) -> float:
    """
    |a - b| relative to the larger magnitude (0 when both vanish)
    """
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return abs(a - b) / scale


def riesz_interval_energy(beta: float) -> float:
    """
    Riesz beta-energy of Lebesgue measure on [0, 1]: 2 / ((1 - beta)(2 - beta))
    """
    return 2.0 / ((1.0 - beta) * (2.0 - beta))
