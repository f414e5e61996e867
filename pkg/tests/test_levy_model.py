"""
tests for the levycap.levy_model module
"""
import json
import math

import numpy as np
import pytest

from levycap import levy_model
from levycap.errors import ConfigurationError, DimensionError
from levycap.levy_model import JumpAtom, LevyTriplet, StablePart


@pytest.fixture
def asymmetric_2d():
    return LevyTriplet(
        2,
        [0.3, -0.2],
        [[1.0, 0.2], [0.2, 0.5]],
        (JumpAtom(np.array([0.5, 0.1]), 2.0), JumpAtom(np.array([-3.0, 1.0]), 0.7)),
        StablePart(1.2, 0.4),
    )


@pytest.fixture
def processes(brownian, poisson, drift, compound_poisson, cauchy):
    return [brownian, poisson, drift, compound_poisson, cauchy]


def test_poisson_exponent_at_pi_is_two(poisson):
    actual = levy_model.evaluate_exponent(poisson, math.pi)
    assert actual.re == pytest.approx(2.0, abs=1e-12)
    assert actual.im == pytest.approx(0.0, abs=1e-12)


def test_poisson_exponent_matches_closed_form(poisson):
    xi = np.linspace(-7, 7, 29)
    re, im = levy_model.exponent_profile(poisson, xi)
    assert np.allclose(re, 1 - np.cos(xi), atol=1e-12)
    assert np.allclose(im, -np.sin(xi), atol=1e-12)


def test_exponent_vanishes_at_origin(processes, asymmetric_2d):
    for spec in processes:
        actual = levy_model.evaluate_exponent(spec, 0.0)
        assert (actual.re, actual.im) == (0.0, 0.0)
    actual = levy_model.evaluate_exponent(asymmetric_2d, [0.0, 0.0])
    assert (actual.re, actual.im) == (0.0, 0.0)


def test_brownian_exponent_is_half_square(brownian):
    actual = levy_model.evaluate_exponent(brownian, 2.0)
    assert (actual.re, actual.im) == (2.0, 0.0)


def test_real_part_even_nonnegative_and_imaginary_part_odd(processes, asymmetric_2d):
    rng = np.random.default_rng(1)
    for spec in processes + [asymmetric_2d]:
        xis = 20 * rng.standard_normal((200, spec.d))
        re, im = levy_model.exponent_profile(spec, xis)
        re_neg, im_neg = levy_model.exponent_profile(spec, -xis)
        assert np.all(re >= -1e-12)
        assert np.max(np.abs(re - re_neg)) <= 1e-12
        assert np.max(np.abs(im + im_neg)) <= 1e-12


def test_chi_of_drift_is_a_rotation(drift):
    actual = levy_model.chi(drift, math.pi, 1.0)
    assert actual.real == pytest.approx(-1.0, abs=1e-12)
    assert actual.imag == pytest.approx(0.0, abs=1e-12)


def test_chi_at_zero_time_is_one(processes):
    for spec in processes:
        assert levy_model.chi(spec, 1.7, 0.0) == 1 + 0j


def test_chi_of_poisson_at_pi(poisson):
    actual = levy_model.chi(poisson, math.pi, 1.0)
    assert actual.real == pytest.approx(math.exp(-2), abs=1e-12)
    assert actual.imag == pytest.approx(0.0, abs=1e-12)


def test_chi_is_conjugated_by_time_reversal_and_bounded(processes, asymmetric_2d):
    rng = np.random.default_rng(2)
    for spec in processes + [asymmetric_2d]:
        for _ in range(20):
            xi = 5 * rng.standard_normal(spec.d)
            x = 3 * rng.standard_normal()
            forward = levy_model.chi(spec, xi, x)
            backward = levy_model.chi(spec, xi, -x)
            assert abs(forward - backward.conjugate()) <= 1e-12
            assert abs(forward) <= 1 + 1e-15


def test_re_chi_parts_examples(drift, poisson, brownian):
    assert levy_model.re_chi_parts(drift, math.pi, 1.0) == pytest.approx((0.0, 1.0))
    assert levy_model.re_chi_parts(brownian, 3.0, 0.0) == (1.0, 0.0)
    pos, neg = levy_model.re_chi_parts(poisson, math.pi, 1.0)
    assert pos == pytest.approx(math.exp(-2))
    assert neg == 0.0


def test_re_chi_parts_are_disjoint_and_bounded(asymmetric_2d):
    rng = np.random.default_rng(3)
    for _ in range(50):
        xi = 4 * rng.standard_normal(2)
        x = 2 * rng.standard_normal()
        pos, neg = levy_model.re_chi_parts(asymmetric_2d, xi, x)
        assert pos * neg == 0
        assert pos - neg == pytest.approx(levy_model.chi(asymmetric_2d, xi, x).real, abs=1e-15)
        envelope = math.exp(-abs(x) * levy_model.evaluate_exponent(asymmetric_2d, xi).re)
        assert max(pos, neg) <= envelope + 1e-15


def test_symmetric_processes_have_real_exponent(brownian, compound_poisson, cauchy):
    for spec in (brownian, compound_poisson, cauchy):
        assert levy_model.symmetry_witness(spec) is None
        assert levy_model.is_symmetric(spec)


def test_symmetry_witness_finds_imaginary_part(poisson, drift):
    witness = levy_model.symmetry_witness(poisson)
    assert witness is not None
    assert abs(levy_model.evaluate_exponent(poisson, witness).im) > 1e-12
    assert not levy_model.is_symmetric(drift)


def test_isotropy(brownian, asymmetric_2d):
    assert levy_model.is_isotropic(LevyTriplet.brownian(3))
    assert levy_model.is_isotropic(LevyTriplet.stable_process(1.5, 2.0, d=2))
    assert levy_model.is_isotropic(brownian)
    assert not levy_model.is_isotropic(asymmetric_2d)


def test_imaginary_bound_of_poisson_is_the_rate(poisson, drift):
    assert levy_model.imag_bound(poisson) == 1.0
    assert levy_model.imag_bound(drift) is None
    re, im = levy_model.exponent_profile(poisson, np.linspace(-50, 50, 1001))
    assert np.max(np.abs(im)) <= 1.0


def test_invalid_triplets_name_the_field():
    with pytest.raises(ConfigurationError, match="A"):
        LevyTriplet(1, [0.0], [[-1.0]])
    with pytest.raises(ConfigurationError, match=r"jumps\[0\].y"):
        LevyTriplet(1, [0.0], [[0.0]], (JumpAtom(np.zeros(1), 1.0),))
    with pytest.raises(ConfigurationError, match=r"jumps\[0\].lambda"):
        LevyTriplet(1, [0.0], [[0.0]], (JumpAtom(np.ones(1), 0.0),))
    with pytest.raises(ConfigurationError, match="stable.alpha"):
        LevyTriplet.stable_process(2.0)
    with pytest.raises(DimensionError):
        LevyTriplet(2, [0.0], np.eye(2))


def test_from_dict_reads_the_process_schema(poisson):
    data = {"d": 1, "b": [1.0], "A": [[0.0]], "jumps": [{"y": [1.0], "lambda": 1.0}]}
    spec = LevyTriplet.from_dict(data)
    xi = np.linspace(-3, 3, 13)
    assert np.allclose(
        levy_model.exponent_profile(spec, xi), levy_model.exponent_profile(poisson, xi)
    )
    assert LevyTriplet.from_dict(spec.to_dict()).to_dict() == spec.to_dict()


def test_from_dict_with_stable_part():
    spec = LevyTriplet.from_dict(
        {"d": 1, "b": [0.0], "A": [[0.0]], "stable": {"alpha": 1.5, "c": 2.0}}
    )
    assert levy_model.evaluate_exponent(spec, 4.0).re == pytest.approx(2.0 * 4.0**1.5)


def test_load_reports_file_and_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"d": 1,\n "b": [1.0,\n}')
    with pytest.raises(ConfigurationError, match="line"):
        LevyTriplet.load(str(path))
    path.write_text(json.dumps({"d": 1, "b": [1.0]}))
    with pytest.raises(ConfigurationError, match="A"):
        LevyTriplet.load(str(path))


@pytest.mark.parametrize(
    "data, field",
    [
        ({"d": 1, "b": [0.0], "A": [[0.0]], "jumps": [{"y": [1.0], "lambda": "one"}]}, "jumps[0].lambda"),
        ({"d": 1, "b": [0.0], "A": [[0.0]], "jumps": [{"y": "up", "lambda": 1.0}]}, "jumps[0].y"),
        ({"d": 1, "b": [0.0], "A": [[0.0]], "stable": {"alpha": None, "c": 1.0}}, "stable.alpha"),
        ({"d": "one", "b": [0.0], "A": [[0.0]]}, "d"),
        ({"d": 1.5, "b": [0.0], "A": [[0.0]]}, "d"),
        ({"d": 1, "b": ["fast"], "A": [[0.0]]}, "b"),
        ({"d": 1, "b": [0.0], "A": [[0.0], [1.0, 2.0]]}, "A"),
        ({"d": 1, "b": [0.0], "A": [[0.0]], "jumps": 3}, "jumps"),
        ([1, 2, 3], "spec"),
    ],
)
def test_from_dict_names_the_badly_typed_field(data, field):
    with pytest.raises(ConfigurationError) as info:
        LevyTriplet.from_dict(data)
    assert info.value.field == field


def test_bounded_real_part(brownian, poisson, drift, compound_poisson, cauchy):
    assert levy_model.has_bounded_real_part(poisson)
    assert levy_model.has_bounded_real_part(drift)
    assert levy_model.has_bounded_real_part(compound_poisson)
    assert not levy_model.has_bounded_real_part(brownian)
    assert not levy_model.has_bounded_real_part(cauchy)
