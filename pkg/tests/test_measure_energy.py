"""
tests for measures, kernels and energies
"""
import math

import numpy as np
import pytest

from levycap import measure_energy as me
from levycap.errors import (
    ConfigurationError,
    DimensionError,
    DomainError,
    UnsupportedConfigurationError,
)
from levycap.gauge import GaugeQuery, Sign, g_gamma
from levycap.measure_energy import DiagonalPolicy, DiscreteMeasure, KernelMatrix, SetGrid


def test_measure_validation():
    with pytest.raises(ConfigurationError, match="sum to one"):
        DiscreteMeasure([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(ConfigurationError, match="nonnegative"):
        DiscreteMeasure([-1.0, 1.0], [0.5, 0.5])
    with pytest.raises(ConfigurationError, match="increasing"):
        DiscreteMeasure([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ConfigurationError, match="positive"):
        DiscreteMeasure([0.0, 1.0], [1.0, 0.0])
    with pytest.raises(DimensionError):
        DiscreteMeasure([0.0, 1.0], [1.0])
    with pytest.raises(ConfigurationError, match="overlap"):
        DiscreteMeasure([0.0, 0.1], [0.5, 0.5], cell=0.2)


def test_weights_are_renormalised():
    mu = DiscreteMeasure([0.0, 1.0], [0.5, 0.5 + 1e-10])
    assert mu.weights.sum() == pytest.approx(1.0, abs=1e-15)


def test_interval_grid_uses_cell_midpoints():
    mu = SetGrid.interval(0.0, 1.0, 4).measure()
    np.testing.assert_allclose(mu.atoms, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(mu.weights, 0.25)
    assert mu.cell == pytest.approx(0.25)


def test_cantor_grid():
    grid = SetGrid.cantor(2)
    mu = grid.measure()
    assert grid.size == 4
    assert mu.cell == pytest.approx(1 / 9)
    np.testing.assert_allclose(mu.atoms, np.array([0, 2 / 9, 6 / 9, 8 / 9]) + 1 / 18)
    deep = SetGrid.cantor(7).measure()
    assert deep.size == 128
    assert deep.atoms[0] > 0 and deep.atoms[-1] < 1


def test_grids_are_validated():
    with pytest.raises(ConfigurationError):
        SetGrid.interval(1.0, 0.5, 4)
    with pytest.raises(ConfigurationError):
        SetGrid.interval(0.0, 1.0, 0)
    with pytest.raises(ConfigurationError):
        SetGrid.cantor(-1)


def test_measure_from_dict_variants():
    assert DiscreteMeasure.from_dict({"uniform": {"a": 0, "b": 2, "n": 8}}).cell == pytest.approx(0.25)
    assert DiscreteMeasure.from_dict({"cantor": {"depth": 3}}).size == 8
    mu = DiscreteMeasure.from_dict({"atoms": [0, 1, 2]})
    np.testing.assert_allclose(mu.weights, 1 / 3)
    with pytest.raises(ConfigurationError, match="uniform.n"):
        DiscreteMeasure.from_dict({"uniform": {"a": 0, "b": 1}})
    again = DiscreteMeasure.from_dict(mu.to_dict())
    np.testing.assert_array_equal(again.atoms, mu.atoms)


@pytest.mark.parametrize(
    "data, field",
    [
        ({"uniform": {"a": 0, "b": 1, "n": "many"}}, "uniform.n"),
        ({"uniform": {"a": 0, "b": 1, "n": 2.5}}, "uniform.n"),
        ({"uniform": {"a": [0], "b": 1, "n": 4}}, "uniform.a"),
        ({"cantor": {"depth": "deep"}}, "cantor.depth"),
        ({"atoms": ["zero", "one"]}, "atoms"),
        ({"atoms": []}, "atoms"),
        ({"atoms": [0, 1], "weights": {"a": 1}}, "weights"),
        ({"atoms": [0, 1], "cell": "wide"}, "cell"),
        ("atoms", "measure"),
    ],
)
def test_measure_from_dict_names_the_badly_typed_field(data, field):
    with pytest.raises(ConfigurationError) as info:
        DiscreteMeasure.from_dict(data)
    assert info.value.field == field


def test_measure_load_reports_line(tmp_path):
    path = tmp_path / "mu.json"
    path.write_text('{\n  "atoms": [0, 1],\n  "weights": [0.5 0.5]\n}')
    with pytest.raises(ConfigurationError, match="line 3"):
        DiscreteMeasure.load(str(path))


def test_kernel_matrix_validation():
    with pytest.raises(DimensionError):
        KernelMatrix(np.ones((2, 3)))
    with pytest.raises(ConfigurationError, match="symmetric"):
        KernelMatrix([[1.0, 2.0], [3.0, 1.0]])
    with pytest.raises(ConfigurationError):
        KernelMatrix([[1.0, -1.0], [-1.0, 1.0]])
    with pytest.raises(ConfigurationError):
        KernelMatrix([[1.0, np.nan], [np.nan, 1.0]])
    with pytest.raises(ConfigurationError, match="symmetric"):
        KernelMatrix([[1.0, np.inf], [1.0, 1.0]])


def test_energy_of_two_points(two_points):
    assert me.energy(KernelMatrix([[3.0, 1.0], [1.0, 3.0]]), two_points) == pytest.approx(2.0)
    assert me.energy(KernelMatrix([[np.inf, 1.0], [1.0, 1.0]]), two_points) == math.inf
    with pytest.raises(DimensionError):
        me.energy(KernelMatrix(np.ones((3, 3))), two_points)


def test_offset_weights_cover_all_pairs():
    mu = SetGrid.interval(0.0, 1.0, 5).measure()
    offsets, pair = me.offset_weights(mu)
    assert offsets[0] == 0
    assert offsets.size == 5
    assert pair.sum() == pytest.approx(1.0)
    assert pair[0] == pytest.approx(0.2)


@pytest.mark.parametrize("xi, expected", [(1.0, 0.5 * (1 + math.exp(-0.5))), (2.0, 0.5 * (1 + math.exp(-2.0)))])
def test_brownian_chi_energy_of_two_points(brownian, two_points, xi, expected):
    assert me.chi_energy(brownian, xi, two_points) == pytest.approx(expected, rel=1e-12)


def test_chi_energy_is_one_at_zero_frequency(poisson, two_points):
    assert me.chi_energy(poisson, 0.0, two_points) == pytest.approx(1.0)
    cells = SetGrid.interval(0.0, 1.0, 8).measure()
    assert me.chi_energy(poisson, 0.0, cells) == pytest.approx(1.0)


@pytest.mark.parametrize("xi", [0.3, 1.0, 2.5, 10.0])
def test_signed_chi_energies_split_the_chi_energy(poisson, drift, xi):
    for mu in (DiscreteMeasure.uniform([0.0, 0.7, 3.0]), SetGrid.interval(0.0, 2.0, 6).measure()):
        for spec in (poisson, drift):
            plus, minus = me.signed_chi_energies(spec, xi, mu)
            total = me.chi_energy(spec, xi, mu)
            assert plus >= 0 and minus >= 0
            assert plus - minus == pytest.approx(total, abs=1e-12)
            assert -1e-12 <= total <= 1 + 1e-12


def test_drift_chi_energy_has_negative_part(drift):
    mu = DiscreteMeasure.uniform([0.0, 1.0])
    plus, minus = me.signed_chi_energies(drift, math.pi, mu)
    # cos(pi) = -1 between the two atoms
    assert minus == pytest.approx(0.5)
    assert plus == pytest.approx(0.5)


def random_measure(rng):
    size = int(rng.integers(1, 7))
    atoms = np.sort(rng.choice(np.arange(0, 300), size=size, replace=False)) / 100.0
    weights = rng.dirichlet(np.ones(size))
    if rng.random() < 0.5:
        return DiscreteMeasure(atoms, weights)
    return DiscreteMeasure(atoms, weights, cell=0.01)


def test_signed_energies_split_the_chi_energy_on_random_triples(
    brownian, poisson, drift, compound_poisson, cauchy
):
    rng = np.random.default_rng(2024)
    specs = (brownian, poisson, drift, compound_poisson, cauchy)
    for _ in range(200):
        spec = specs[int(rng.integers(len(specs)))]
        xi = float(rng.uniform(-10.0, 10.0))
        mu = random_measure(rng)
        plus, minus = me.signed_chi_energies(spec, xi, mu)
        total = me.chi_energy(spec, xi, mu)
        assert plus >= 0 and minus >= 0
        assert abs(plus - minus - total) <= 1e-12, (spec.name, xi, mu.to_dict())
        assert -1e-12 <= total <= 1 + 1e-12


def test_energy_does_not_depend_on_the_order_of_atoms():
    rng = np.random.default_rng(5)
    for _ in range(20):
        mu = random_measure(rng)
        K = me.riesz_kernel(0.5, mu.atoms, DiagonalPolicy.CELL_AVERAGED, 0.01)
        order = rng.permutation(mu.size)
        # same atoms relabelled: weights and kernel permuted together
        shuffled = DiscreteMeasure(mu.atoms, mu.weights[order])
        permuted = KernelMatrix(K.entries[np.ix_(order, order)], K.policy, K.cell)
        assert me.energy(permuted, shuffled) == pytest.approx(me.energy(K, mu), rel=1e-12)


def test_constant_kernel_energy_is_the_constant():
    rng = np.random.default_rng(9)
    for _ in range(20):
        mu = random_measure(rng)
        c = float(rng.uniform(0.1, 10.0))
        assert me.energy(KernelMatrix(np.full((mu.size, mu.size), c)), mu) == pytest.approx(c, rel=1e-12)


def test_raw_riesz_kernel():
    K = me.riesz_kernel(0.5, [0.0, 0.25, 1.0])
    assert np.all(np.isinf(np.diag(K.entries)))
    assert K.entries[0, 1] == pytest.approx(2.0)
    assert K.entries[0, 2] == pytest.approx(1.0)
    assert K.policy is DiagonalPolicy.RAW


def test_cell_averaged_riesz_kernel():
    beta, h = 0.5, 0.01
    K = me.riesz_kernel(beta, [0.0, 0.5, 1.0], DiagonalPolicy.CELL_AVERAGED, h)
    diagonal = h**-beta * 2 / ((1 - beta) * (2 - beta))
    np.testing.assert_allclose(np.diag(K.entries), diagonal)
    assert K.entries[0, 2] == pytest.approx(1.0, rel=1e-4)
    assert K.entries[0, 1] > 0.5**-beta


@pytest.mark.parametrize("n", [1, 16, 64])
def test_uniform_riesz_energy_is_exact_for_every_grid(n):
    grid = SetGrid.interval(0.0, 1.0, n)
    mu = grid.measure()
    assert me.energy(me.riesz_kernel_for(0.5, mu), mu) == pytest.approx(8 / 3, rel=1e-10)
    assert me.interval_riesz_energy(0.5, grid) == pytest.approx(8 / 3, rel=1e-10)


def test_large_interval_riesz_energy_matches_closed_form():
    beta = 0.25
    expected = 2 / ((1 - beta) * (2 - beta))
    assert me.interval_riesz_energy(beta, SetGrid.interval(0.0, 1.0, 4096)) == pytest.approx(expected, rel=1e-8)


def test_riesz_kernel_domain():
    with pytest.raises(DomainError):
        me.riesz_kernel(0.0, [0.0, 1.0])
    with pytest.raises(UnsupportedConfigurationError):
        me.riesz_kernel(1.0, [0.0, 1.0], DiagonalPolicy.CELL_AVERAGED, 0.1)
    with pytest.raises(ConfigurationError, match="cell"):
        me.riesz_kernel(0.5, [0.0, 1.0], DiagonalPolicy.CELL_AVERAGED)
    with pytest.raises(ConfigurationError):
        me.interval_riesz_energy(0.5, SetGrid.cantor(3))


def test_raw_gauge_kernel_of_brownian(brownian, two_points):
    K = me.gauge_kernel(brownian, 0.5, Sign.PLUS, two_points)
    assert np.all(np.isinf(np.diag(K.entries)))
    expected = g_gamma(GaugeQuery(brownian, 0.5, 1.0)).value
    assert K.entries[0, 1] == pytest.approx(expected)
    assert me.gauge_energy(brownian, 0.5, Sign.PLUS, two_points) == math.inf


def test_drift_plus_gauge_kernel_is_infinite_everywhere(drift):
    mu = SetGrid.interval(0.0, 1.0, 4).measure()
    K = me.gauge_kernel(drift, 0.5, Sign.PLUS, mu)
    assert np.all(np.isinf(K.entries))
    assert me.gauge_energy(drift, 0.5, Sign.PLUS, mu) == math.inf


def test_gauge_kernel_can_skip_entries_past_a_divergent_diagonal(brownian, two_points):
    K = me.gauge_kernel(brownian, 0.5, Sign.PLUS, two_points, skip_if_diagonal_diverges=True)
    assert np.all(np.isinf(K.entries))
    mu = SetGrid.interval(0.0, 1.0, 4).measure()
    kept = me.gauge_kernel(brownian, 0.5, Sign.PLUS, mu, skip_if_diagonal_diverges=True)
    assert np.all(np.isfinite(kept.entries))


def test_cell_gauge_energy_matches_kernel(brownian):
    mu = SetGrid.interval(0.0, 1.0, 4).measure()
    K = me.gauge_kernel(brownian, 0.5, Sign.PLUS, mu)
    assert K.policy is DiagonalPolicy.CELL_AVERAGED
    assert np.all(np.isfinite(K.entries))
    assert me.gauge_energy(brownian, 0.5, Sign.PLUS, mu) == pytest.approx(me.energy(K, mu), rel=1e-12)
    assert me.gauge_energy(brownian, 0.5, Sign.MINUS, mu) == 0
