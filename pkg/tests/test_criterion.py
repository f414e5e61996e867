"""
tests for the criterion integral and the Fubini swap
"""
import math

import pytest
from scipy.special import gamma as gamma_function

from levycap import criterion
from levycap.criterion import Interpretation
from levycap.errors import DomainError
from levycap.gauge import Divergent, Finite, Sign
from levycap.measure_energy import DiscreteMeasure, SetGrid
from levycap.utils import riesz_interval_energy


@pytest.fixture
def cells():
    return SetGrid.interval(0.0, 1.0, 4).measure()


def test_measure_span(two_points, cells):
    assert criterion.measure_span(two_points) == pytest.approx(1.0)
    assert criterion.measure_span(cells) == pytest.approx(1.0)


def test_dirac_measures_give_divergent_criterion_integrals(brownian, two_points):
    report = criterion.criterion_integral(brownian, two_points, 0.5)
    assert isinstance(report.value, Divergent)
    assert report.interpretation is Interpretation.INCONCLUSIVE
    assert report.atoms == 2


def test_cell_measures_can_certify_positive_capacity(brownian, cells):
    report = criterion.criterion_integral(brownian, cells, 0.5)
    assert isinstance(report.value, Finite)
    assert report.value.value > 0
    assert report.interpretation is Interpretation.POSITIVE
    assert report.to_dict()["interpretation"] == "positive_capacity_for_this_G"


def test_beta_must_lie_inside_the_dimension(brownian, two_points):
    with pytest.raises(DomainError, match="beta"):
        criterion.criterion_integral(brownian, two_points, 1.0)
    with pytest.raises(DomainError):
        criterion.condition_e_check(brownian, two_points, 0.0)


def test_fubini_swap_on_cell_measure(brownian, cells):
    report = criterion.fubini_check(brownian, cells, 0.5, Sign.PLUS)
    assert report.kinds_agree
    assert report.iterated.is_finite
    assert report.relative_gap < 1e-5


def test_fubini_swap_with_full_sign_matches_plus_for_brownian(brownian, cells):
    full = criterion.iterated_integral(brownian, cells, 0.5, Sign.FULL)
    plus = criterion.iterated_integral(brownian, cells, 0.5, Sign.PLUS)
    assert full.value == pytest.approx(plus.value, rel=1e-8)


def test_fubini_swap_agrees_on_divergence(brownian, drift, two_points):
    report = criterion.fubini_check(brownian, two_points, 0.5)
    assert report.kinds_agree and report.relative_gap is None
    assert report.energy_of_gauge == float("inf")
    minus = criterion.fubini_check(drift, two_points, 0.5, Sign.MINUS)
    assert not minus.iterated.is_finite
    assert minus.kinds_agree


def test_fubini_minus_part_of_short_poisson_measure(poisson):
    mu = DiscreteMeasure.uniform([0.0, 0.5])
    report = criterion.fubini_check(poisson, mu, 0.5, Sign.MINUS)
    assert report.iterated.value == 0
    assert report.energy_of_gauge == 0
    assert report.relative_gap == 0


def test_condition_check_verdicts(poisson, brownian, drift, two_points, cells):
    short = DiscreteMeasure.uniform([0.0, 0.5])
    report = criterion.condition_e_check(poisson, short, 0.5)
    assert report.minus_finite and report.plus_infinite
    assert report.verdict.startswith("minus integral finite and plus energy infinite")

    smooth = criterion.condition_e_check(brownian, cells, 0.5)
    assert smooth.minus_finite and not smooth.plus_infinite

    rough = criterion.condition_e_check(drift, two_points, 0.5)
    assert not rough.minus_finite
    assert rough.to_dict()["verdict"] == "minus integral divergent for this mu"


@pytest.mark.parametrize("sign", [Sign.PLUS, Sign.MINUS])
def test_fubini_swap_for_brownian_on_eight_cells(brownian, sign):
    mu = SetGrid.interval(0.0, 1.0, 8).measure()
    report = criterion.fubini_check(brownian, mu, 0.5, sign)
    assert report.kinds_agree
    if sign is Sign.MINUS:
        assert report.iterated.value == 0
        assert report.energy_of_gauge == 0
    else:
        assert report.relative_gap < 1e-4


def test_drift_criterion_integral_is_the_scaled_riesz_energy(drift):
    # E_{chi_xi} of Lebesgue measure on [0, 1] is sinc^2(xi / 2), and
    # int |xi|^{beta-1} e^{i xi t} dxi = 2 Gamma(beta) cos(pi beta / 2) |t|^{-beta}
    beta = 0.5
    mu = SetGrid.interval(0.0, 1.0, 64).measure()
    report = criterion.criterion_integral(drift, mu, beta)
    assert isinstance(report.value, Finite)
    assert report.interpretation is Interpretation.POSITIVE
    scale = 2 * gamma_function(beta) * math.cos(math.pi * beta / 2)
    assert report.value.value == pytest.approx(scale * riesz_interval_energy(beta), rel=1e-4)
    assert len(report.value.rings) < 20
